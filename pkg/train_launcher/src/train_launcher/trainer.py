"""Built-in desk-scale SFT trainer over a tiny byte-level language model.

Live runs only support the built-in model: production-sized base models are
declared in manifests for provenance but are not trainable in-process, and
asking for one raises TrainerFailure instead of silently substituting.

Each record maps to one conversation-formatted training example (system
text, replayed history turns, then the instruction/input as the final user
message with the output as the supervised completion), so the dataset and
the trainer's input stream correspond one to one.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

import torch
from torch import nn

from .errors import TrainerFailure

TINY_MODEL_ID = "tiny-byte-lm"

BOS = 256
EOS = 257
PAD = 258
VOCAB_SIZE = 259
IGNORE_INDEX = -100


@dataclass
class Example:
    record_index: int
    input_ids: list[int]
    labels: list[int]


def render_example(record: dict) -> tuple[str, str]:
    """Map one five-field record to (prompt text, supervised completion)."""
    parts: list[str] = []
    if record["system"]:
        parts.append(record["system"] + "\n")
    for question, answer in record["history"]:
        parts.append(f"User: {question}\nAssistant: {answer}\n")
    user_turn = record["instruction"]
    if record["input"]:
        user_turn += "\n" + record["input"]
    parts.append(f"User: {user_turn}\nAssistant: ")
    return "".join(parts), record["output"]


def encode_example(record_index: int, prompt: str, completion: str, max_seq_len: int) -> Example:
    """Byte-tokenize one example; the prompt carries no loss.

    Overlong sequences are truncated from the left so the supervised
    completion (and its end marker) always survives.
    """
    prompt_ids = [BOS] + list(prompt.encode("utf-8"))
    completion_ids = list(completion.encode("utf-8")) + [EOS]
    input_ids = prompt_ids + completion_ids
    labels = [IGNORE_INDEX] * len(prompt_ids) + completion_ids
    if len(input_ids) > max_seq_len:
        input_ids = input_ids[-max_seq_len:]
        labels = labels[-max_seq_len:]
    return Example(record_index=record_index, input_ids=input_ids, labels=labels)


def build_examples(records: list[dict], max_seq_len: int) -> list[Example]:
    """One example per record, in file order; the mapping drops nothing."""
    examples = []
    for index, record in enumerate(records):
        prompt, completion = render_example(record)
        examples.append(encode_example(index, prompt, completion, max_seq_len))
    return examples


class TinyByteLM(nn.Module):
    """A few hundred thousand parameters; enough to watch a loss move."""

    def __init__(self, embed_dim: int = 64, hidden_dim: int = 128):
        super().__init__()
        self.embed = nn.Embedding(VOCAB_SIZE, embed_dim, padding_idx=PAD)
        self.rnn = nn.GRU(embed_dim, hidden_dim, batch_first=True)
        self.head = nn.Linear(hidden_dim, VOCAB_SIZE)

    def forward(self, input_ids: torch.Tensor) -> torch.Tensor:
        hidden, _ = self.rnn(self.embed(input_ids))
        return self.head(hidden)


def _batch_tensors(batch: list[Example]) -> tuple[torch.Tensor, torch.Tensor]:
    width = max(len(ex.input_ids) for ex in batch)
    ids = torch.full((len(batch), width), PAD, dtype=torch.long)
    labels = torch.full((len(batch), width), IGNORE_INDEX, dtype=torch.long)
    for row, ex in enumerate(batch):
        ids[row, : len(ex.input_ids)] = torch.tensor(ex.input_ids, dtype=torch.long)
        labels[row, : len(ex.labels)] = torch.tensor(ex.labels, dtype=torch.long)
    return ids, labels


def run_training(records: list[dict], config: dict, output_dir: str | Path) -> dict:
    """Train on CPU, logging one JSONL line per optimizer step.

    Writes loss_log.jsonl, model.pt, and resolved_config.json under
    output_dir and returns a summary. Raises TrainerFailure for an
    unsupported base model, an empty dataset, a non-finite loss, or any
    error the training loop itself throws.
    """
    base_model_id = config["base_model_id"]
    if base_model_id != TINY_MODEL_ID:
        raise TrainerFailure(
            f"no in-process trainer for base model {base_model_id!r}; "
            f"only {TINY_MODEL_ID!r} can run here"
        )
    if not records:
        raise TrainerFailure("no trainable records in the dataset")
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    examples = build_examples(records, config["max_seq_len"])
    torch.manual_seed(config["seed"])
    device = torch.device("cpu")
    model = TinyByteLM().to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=config["learning_rate"])
    loss_fn = nn.CrossEntropyLoss(ignore_index=IGNORE_INDEX)
    rng = random.Random(config["seed"])
    log_path = out / "loss_log.jsonl"
    step = 0
    last_loss = math.nan
    batch_size = config["batch_size"]
    try:
        with open(log_path, "w", encoding="utf-8") as log:
            for epoch in range(1, config["epochs"] + 1):
                order = list(range(len(examples)))
                rng.shuffle(order)
                for start in range(0, len(order), batch_size):
                    batch = [examples[i] for i in order[start : start + batch_size]]
                    ids, labels = _batch_tensors(batch)
                    optimizer.zero_grad()
                    logits = model(ids)
                    loss = loss_fn(
                        logits[:, :-1].reshape(-1, VOCAB_SIZE), labels[:, 1:].reshape(-1)
                    )
                    loss_value = float(loss.item())
                    step += 1
                    if not math.isfinite(loss_value):
                        raise TrainerFailure(f"non-finite loss at step {step}")
                    loss.backward()
                    optimizer.step()
                    log.write(
                        json.dumps({"step": step, "epoch": epoch, "loss": loss_value}) + "\n"
                    )
                    log.flush()
                    last_loss = loss_value
    except RuntimeError as exc:
        raise TrainerFailure(f"training loop failed: {exc}") from exc
    checkpoint_path = out / "model.pt"
    torch.save(model.state_dict(), checkpoint_path)
    config_path = out / "resolved_config.json"
    config_path.write_text(
        json.dumps(config, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    return {
        "records": len(records),
        "epochs": config["epochs"],
        "steps": step,
        "final_loss": last_loss,
        "loss_log": str(log_path),
        "checkpoint": str(checkpoint_path),
    }
