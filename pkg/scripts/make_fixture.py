"""Regenerate the bundled 50-document source fixture under tests/fixtures.

The fixture is deterministic (fixed seed), bilingual, and sized so the
five pools exceed their quotas at the default 100,000-unit budget. The
text is synthetic fusion-flavored prose; it deliberately contains no
colon characters so scripted mock completions that echo chunk text can
never produce stray Q/A markers. Run from the repo root:

    python scripts/make_fixture.py
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from fusionkit.textunits import approx_token_count  # noqa: E402

ROOT = Path(__file__).resolve().parents[1] / "tests" / "fixtures" / "sources"

EN_SUBJECTS = [
    "the divertor target", "the toroidal field coil", "the plasma current",
    "the neutral beam system", "the pellet injector", "the vacuum vessel",
    "the edge pedestal", "the scrape-off layer", "the cryopump array",
    "the bootstrap current fraction", "the impurity radiation front",
    "the resonant perturbation coil", "the lower hybrid antenna",
    "the sawtooth cycle", "the ballooning mode envelope",
    "the tungsten monoblock", "the separatrix geometry",
    "the energy confinement time", "the safety factor profile",
    "the electron cyclotron launcher",
]

EN_VERBS = [
    "constrains", "modulates", "stabilizes", "degrades", "amplifies",
    "tracks", "saturates near", "responds to", "decouples from",
    "redistributes", "screens", "broadens", "quenches", "sustains",
    "anticipates", "overwhelms", "mirrors", "offsets",
]

EN_OBJECTS = [
    "the heat flux footprint", "the density pump-out", "the ion temperature gradient",
    "the locked mode threshold", "the fuelling efficiency", "the radiative fraction",
    "the pedestal pressure", "the neutral recycling flux", "the magnetic shear",
    "the turbulent transport level", "the detachment window", "the impurity influx",
    "the current ramp trajectory", "the power crossing the separatrix",
    "the helium ash inventory", "the strike point excursion",
    "the edge rotation shear", "the ablation cloud drift",
]

EN_TAILS = [
    "during the flat-top phase", "under high triangularity", "in reversed shear regimes",
    "at the Greenwald fraction", "across consecutive discharges", "within measurement error",
    "before the back transition", "after boronization", "in long-pulse operation",
    "when gas puffing stops", "near the density limit", "along the outer leg",
    "despite strong seeding", "throughout the current quench", "in the far scrape-off layer",
    "between sawtooth crashes",
]

ZH_SUBJECTS = [
    "等离子体电流", "偏滤器靶板", "边缘台基压强", "中性束加热系统", "弹丸注入装置",
    "真空室壁面", "刮削层流动", "杂质辐射份额", "安全因子剖面", "低杂波天线",
    "超导磁体系统", "锯齿振荡周期", "自举电流份额", "电子回旋加热功率", "磁岛宽度",
    "再循环中性粒子通量", "脱靶运行窗口", "钨偏滤器部件", "能量约束时间", "放电平台段",
]

ZH_VERBS = [
    "显著影响", "有效抑制", "逐渐增强", "明显降低", "持续维持", "间接调节",
    "快速响应", "缓慢改变", "部分屏蔽", "重新分配", "强烈依赖于", "大幅拓宽",
    "不断积累", "周期性扰动", "精确跟踪", "同步放大",
]

ZH_OBJECTS = [
    "芯部热输运水平", "靶板热流分布", "密度极限裕度", "台基稳定性边界", "杂质向内渗透",
    "加料效率评估", "磁面重联过程", "边界湍流强度", "破裂预警信号", "粒子平衡状态",
    "辐射坍缩风险", "约束模式转换", "电流爬升轨迹", "氦灰排出速率", "中子产额测量",
    "波功率沉积位置",
]

ZH_TAILS = [
    "在高密度运行阶段", "在长脉冲放电期间", "在强加热条件下", "在边界局域模爆发时",
    "在脱靶状态附近", "在电流下降段", "在杂质注入之后", "在高三角形变位形中",
    "在低动量注入情形下", "在实验统计误差范围内", "在连续多炮放电中", "在壁处理完成后",
]


def en_sentence(rng: random.Random) -> str:
    s = (
        f"{rng.choice(EN_SUBJECTS)} {rng.choice(EN_VERBS)} "
        f"{rng.choice(EN_OBJECTS)} {rng.choice(EN_TAILS)}"
    )
    if rng.random() < 0.3:
        s += f", shifting by {rng.randint(2, 95)} percent in shot {rng.randint(10000, 99999)}"
    return s[0].upper() + s[1:] + "."


def zh_sentence(rng: random.Random) -> str:
    s = f"{rng.choice(ZH_SUBJECTS)}{rng.choice(ZH_VERBS)}{rng.choice(ZH_OBJECTS)}{rng.choice(ZH_TAILS)}"
    if rng.random() < 0.25:
        s += f"，第{rng.randint(3, 80)}炮实验给出了一致的趋势"
    return s + "。"


def build_text(rng: random.Random, lang: str, target_units: int) -> str:
    sentences: list[str] = []
    units = 0
    while units < target_units:
        sentence = zh_sentence(rng) if lang == "zh" else en_sentence(rng)
        sentences.append(sentence)
        units += approx_token_count(sentence)
    if lang == "zh":
        # paragraph every 8 sentences
        paragraphs = ["".join(sentences[i : i + 8]) for i in range(0, len(sentences), 8)]
    else:
        paragraphs = [" ".join(sentences[i : i + 6]) for i in range(0, len(sentences), 6)]
    return "\n\n".join(paragraphs) + "\n"


def main() -> None:
    rng = random.Random(20250814)
    plans = {
        "commoncrawl": [],  # handled below: record files
        "cnki": [("article", "zh", 1300, 5)],
        "ebooks": [("book", "en", 1100, 5)],
        "arxiv": [("paper", "en", 1300, 10)],
        "dissertation": [("thesis", None, 1300, 10)],  # None: alternate zh/en
    }
    total_units = 0
    for kind, entries in plans.items():
        out_dir = ROOT / kind
        out_dir.mkdir(parents=True, exist_ok=True)
        for stem, lang, units, count in entries:
            for i in range(count):
                doc_lang = lang or ("zh" if i % 2 == 0 else "en")
                text = build_text(rng, doc_lang, units)
                (out_dir / f"{stem}-{i:02d}.txt").write_text(text, encoding="utf-8")
                total_units += approx_token_count(text)

    crawl_dir = ROOT / "commoncrawl"
    crawl_dir.mkdir(parents=True, exist_ok=True)
    for file_index in range(2):
        records = []
        for _ in range(10):
            records.append(build_text(rng, "en", 4000))
        body = "\n---RECORD---\n".join(records)
        (crawl_dir / f"crawl-{file_index:02d}.txt").write_text(body, encoding="utf-8")
        total_units += approx_token_count(body)

    print(f"fixture written under {ROOT} with ~{total_units} units")


if __name__ == "__main__":
    main()
