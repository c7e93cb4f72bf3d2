"""Regenerate src/fusionkit/data/questionnaire.jsonl.

The shipped questionnaire is a stand-in item bank: ten fixed topics with
hand-written bilingual questions, 184 items total (the first four topics
carry 19 items, the remaining six carry 18). Every item is marked
placeholder=true so downstream reports can flag that the bank is
synthetic. Run from the repo root:

    python scripts/make_questionnaire.py
"""

from __future__ import annotations

import json
from pathlib import Path

TOPIC_BANKS: list[tuple[str, str, list[str], list[str]]] = [
    (
        "RMP and heat flux",
        "rmp-heat-flux",
        [
            "How do resonant magnetic perturbations suppress edge-localized modes in H-mode plasmas?",
            "What mechanisms set the divertor heat flux width in a tokamak, and how do RMP fields modify it?",
            "How does the toroidal mode number of an applied RMP field affect strike-point splitting on the divertor targets?",
            "Why can RMP-induced density pump-out degrade confinement, and how is it mitigated?",
            "What diagnostics are used to measure transient heat loads on plasma-facing components during ELMs?",
            "How is the Eich scaling used to extrapolate the scrape-off layer heat flux width to larger devices?",
            "What role do plasma response currents play in screening applied resonant magnetic perturbations?",
            "How do lobe structures near the X-point form under RMP fields, and what do they imply for target heat loads?",
            "What are the trade-offs between RMP ELM suppression and fast-ion losses?",
            "How does divertor detachment change the peak heat flux during RMP operation?",
        ],
        [
            "共振磁扰动如何抑制高约束模式等离子体中的边缘局域模?",
            "托卡马克偏滤器靶板上的热流宽度由哪些物理过程决定?",
            "施加共振磁扰动后打击点分裂现象是如何产生的?",
            "共振磁扰动引起的密度泵出效应对约束性能有什么影响?",
            "如何测量边缘局域模爆发期间偏滤器靶板的瞬态热负荷?",
            "等离子体响应电流对外加共振磁扰动的屏蔽作用如何评估?",
            "在共振磁扰动作用下X点附近的磁力线叶状结构有什么特征?",
            "共振磁扰动对快离子损失有什么影响,如何缓解?",
            "偏滤器脱靶运行如何降低峰值热流密度?",
            "如何将刮削层热流宽度的定标律外推到未来聚变装置?",
        ],
    ),
    (
        "MHD theoretical foundations and phenomena",
        "mhd",
        [
            "What assumptions underlie ideal magnetohydrodynamics, and when do they break down in tokamak plasmas?",
            "How does the safety factor profile determine the stability of internal kink modes?",
            "What is the physical mechanism of neoclassical tearing mode growth?",
            "How do sawtooth oscillations redistribute current and temperature in the plasma core?",
            "What distinguishes resistive ballooning modes from ideal ballooning modes?",
            "How is the Grad-Shafranov equation used to compute axisymmetric plasma equilibria?",
            "What are the consequences of a locked mode for discharge survival?",
            "How does plasma rotation stabilize resistive wall modes?",
            "What is the role of the Mercier criterion in assessing interchange stability?",
            "How do disruptions evolve from MHD precursors to thermal and current quenches?",
        ],
        [
            "理想磁流体力学的基本假设是什么,在托卡马克等离子体中何时失效?",
            "安全因子剖面如何影响内扭曲模的稳定性?",
            "新经典撕裂模增长的物理机制是什么?",
            "锯齿振荡如何重新分布等离子体芯部的电流和温度?",
            "电阻气球模与理想气球模有什么区别?",
            "如何利用Grad-Shafranov方程计算轴对称等离子体平衡?",
            "锁模对放电安全有什么危害,如何应对?",
            "等离子体旋转如何稳定电阻壁模?",
            "评估交换不稳定性时Mercier判据起什么作用?",
            "大破裂是如何从磁流体不稳定性先兆发展到热猝灭和电流猝灭的?",
        ],
    ),
    (
        "tokamak fuelling",
        "fuelling",
        [
            "What are the relative merits of gas puffing, pellet injection, and supersonic molecular beam injection for core fuelling?",
            "How does pellet ablation deposit particles inside the plasma, and what determines the penetration depth?",
            "Why does high-field-side pellet injection fuel more efficiently than low-field-side injection?",
            "How is the fuelling efficiency of supersonic molecular beam injection measured?",
            "What constraints does the density limit place on fuelling strategies?",
            "How does edge recycling interact with external fuelling in the particle balance?",
            "What fuelling schemes are proposed for tritium in future reactors?",
            "How do ELMs expel particles deposited by pellets, and how is this mitigated?",
            "What role does the Greenwald fraction play in planning fuelling waveforms?",
            "How is real-time density feedback control implemented with pellet injection actuators?",
        ],
        [
            "喷气加料、弹丸注入和超声分子束注入各有什么优缺点?",
            "弹丸消融过程如何在等离子体内沉积粒子,穿透深度由什么决定?",
            "为什么强场侧弹丸注入的加料效率高于弱场侧注入?",
            "如何测量超声分子束注入的加料效率?",
            "密度极限对加料策略有什么约束?",
            "边界再循环与外部加料在粒子平衡中如何相互作用?",
            "未来聚变堆中氚加料有哪些方案?",
            "边缘局域模如何排出弹丸沉积的粒子,如何缓解?",
            "Greenwald密度分数在设计加料波形时起什么作用?",
            "如何利用弹丸注入执行器实现密度实时反馈控制?",
        ],
    ),
    (
        "tokamak high-density operation",
        "high-density",
        [
            "What physics sets the Greenwald density limit in tokamaks?",
            "How does high-density operation affect the transition to detached divertor regimes?",
            "What instabilities limit operation near the density limit?",
            "How do MARFEs form and why do they often precede density-limit disruptions?",
            "What is the relationship between high density and radiative collapse of the plasma edge?",
            "How can pellet injection extend operation above the empirical density limit?",
            "What are the confinement penalties of operating at high Greenwald fraction?",
            "How does impurity seeding enable high-density, high-radiation scenarios?",
            "What diagnostic signatures indicate an approach to the density limit?",
            "How do future reactor scenarios reconcile high core density with edge power balance?",
        ],
        [
            "托卡马克中Greenwald密度极限由什么物理机制决定?",
            "高密度运行如何影响偏滤器脱靶状态的转变?",
            "接近密度极限运行时有哪些不稳定性?",
            "MARFE是如何形成的,为什么常常先于密度极限破裂出现?",
            "高密度与等离子体边缘辐射坍缩之间有什么关系?",
            "弹丸注入如何帮助突破经验密度极限?",
            "在高Greenwald分数下运行会带来哪些约束代价?",
            "杂质注入如何实现高密度高辐射运行方案?",
            "哪些诊断信号表明等离子体正在接近密度极限?",
            "未来聚变堆如何兼顾高芯部密度与边界功率平衡?",
        ],
    ),
    (
        "tokamak vacuum system",
        "vacuum",
        [
            "What pumping technologies are used to reach base pressure in a tokamak vacuum vessel?",
            "How does wall conditioning by baking and glow discharge cleaning reduce impurity outgassing?",
            "What determines the required pumping speed of the divertor cryopumps?",
            "How are leak detection and accounting performed on large vacuum vessels?",
            "Why is boronization used, and how does it change wall recycling?",
            "What materials constraints govern in-vessel components exposed to high vacuum and plasma?",
            "How is the neutral pressure in the divertor measured and controlled?",
            "What outgassing behaviors complicate achieving ultra-high vacuum after venting?",
            "How do cryopumps handle helium ash pumping in reactor conditions?",
            "What interlocks protect the vacuum system during disruptions or loss of coolant?",
        ],
        [
            "托卡马克真空室达到本底真空需要哪些抽气技术?",
            "烘烤和辉光放电清洗如何减少杂质放气?",
            "偏滤器低温泵所需抽速由什么决定?",
            "大型真空室如何进行检漏与漏率核算?",
            "为什么要进行硼化处理,它如何改变壁再循环?",
            "暴露在高真空和等离子体环境下的部件有哪些材料约束?",
            "偏滤器中性气压如何测量与控制?",
            "放气行为为何使破空后恢复超高真空变得困难?",
            "堆工况下低温泵如何处理氦灰抽除?",
            "破裂或失冷事件期间真空系统有哪些联锁保护?",
        ],
    ),
    (
        "plasma discharge simulation methods",
        "discharge-sim",
        [
            "How do integrated modeling suites couple core transport, edge physics, and heating sources for discharge simulation?",
            "What are the strengths and limits of gyrokinetic simulation for predicting turbulent transport?",
            "How is the plasma equilibrium reconstructed from magnetic measurements in between-shot analysis?",
            "What numerical challenges arise in free-boundary tokamak discharge evolution codes?",
            "How do scrape-off layer codes model plasma-neutral interactions?",
            "What validation methodology compares simulated discharges to experiments?",
            "How are machine learning surrogates used to accelerate transport solvers?",
            "What role do discharge flight simulators play in scenario development for new devices?",
            "How is current ramp-up modeled to avoid MHD instability during startup?",
            "How do simulations treat the coupling between impurity radiation and thermal stability?",
        ],
        [
            "集成建模程序如何耦合芯部输运、边界物理与加热源以模拟放电?",
            "回旋动理学模拟在预测湍流输运方面有哪些优势与局限?",
            "如何利用磁测量在炮间分析中重建等离子体平衡?",
            "自由边界托卡马克放电演化程序面临哪些数值挑战?",
            "刮削层程序如何模拟等离子体与中性粒子的相互作用?",
            "用什么验证方法比较模拟放电与实验结果?",
            "机器学习代理模型如何加速输运求解器?",
            "放电飞行模拟器在新装置方案设计中起什么作用?",
            "如何模拟电流爬升阶段以避免启动期间的磁流体不稳定性?",
            "模拟中如何处理杂质辐射与热稳定性的耦合?",
        ],
    ),
    (
        "wave heating",
        "wave-heating",
        [
            "How does ion cyclotron resonance heating deposit power in a multi-ion-species plasma?",
            "What determines the accessibility of lower hybrid waves for current drive?",
            "How is electron cyclotron resonance heating used for localized current drive and NTM control?",
            "What antenna design issues limit coupling of ion cyclotron waves to the plasma edge?",
            "How do mode conversion processes affect wave heating efficiency?",
            "What is the role of helicon waves in off-axis current drive concepts?",
            "How is power deposition of electron cyclotron waves calculated with ray tracing?",
            "What impurity production issues accompany high-power wave heating?",
            "How does the density profile affect lower hybrid wave penetration in high-density plasmas?",
            "How are wave heating systems integrated with plasma control for real-time actuation?",
        ],
        [
            "离子回旋共振加热如何在多离子成分等离子体中沉积功率?",
            "低杂波电流驱动的可及性条件由什么决定?",
            "电子回旋共振加热如何用于局域电流驱动和新经典撕裂模控制?",
            "离子回旋波天线与边界等离子体耦合存在哪些设计难题?",
            "模式转换过程如何影响波加热效率?",
            "螺旋波在离轴电流驱动方案中扮演什么角色?",
            "如何用射线追踪计算电子回旋波的功率沉积?",
            "大功率波加热会带来哪些杂质产生问题?",
            "高密度等离子体中密度剖面如何影响低杂波的穿透?",
            "波加热系统如何与等离子体控制集成实现实时调控?",
        ],
    ),
    (
        "impurity research",
        "impurity",
        [
            "How do high-Z impurities accumulate in the plasma core, and what transport mechanisms drive this?",
            "What spectroscopy techniques quantify impurity densities in the plasma?",
            "How does impurity seeding reduce divertor heat loads without degrading core performance?",
            "Why is tungsten sputtering a concern for plasma-facing components, and how is it controlled?",
            "What is the effect of impurity radiation on the power balance of a burning plasma?",
            "How is the effective charge measured and what does it indicate about plasma purity?",
            "How do edge transport barriers influence impurity penetration?",
            "What mitigation strategies exist for core impurity accumulation during long pulses?",
            "How does ELM flushing help remove impurities from the pedestal region?",
            "What modeling tools predict impurity migration and redeposition in the divertor?",
        ],
        [
            "高Z杂质如何在等离子体芯部积累,由哪些输运机制驱动?",
            "有哪些光谱诊断技术可以定量测量等离子体中的杂质密度?",
            "杂质注入如何在不降低芯部性能的前提下降低偏滤器热负荷?",
            "为什么钨溅射对面向等离子体部件是重要问题,如何控制?",
            "杂质辐射对燃烧等离子体功率平衡有什么影响?",
            "有效电荷数如何测量,它反映了等离子体纯度的什么信息?",
            "边界输运垒如何影响杂质向内渗透?",
            "长脉冲运行期间抑制芯部杂质积累有哪些策略?",
            "边缘局域模的冲刷作用如何帮助清除台基区杂质?",
            "哪些模拟工具可以预测杂质在偏滤器中的迁移与再沉积?",
        ],
    ),
    (
        "plasma boundary",
        "boundary",
        [
            "What processes govern particle and energy transport across the separatrix into the scrape-off layer?",
            "How do plasma filaments contribute to cross-field transport in the boundary region?",
            "What is the role of the pedestal in determining overall confinement in H-mode?",
            "How do sheath boundary conditions shape the plasma-wall interaction?",
            "What determines the L-H transition power threshold?",
            "How is scrape-off layer flow measured, and why does it matter for impurity migration?",
            "What advances have been made in understanding pedestal stability with peeling-ballooning theory?",
            "How do divertor geometries such as snowflake and super-X alter boundary plasma behavior?",
            "How does neutral penetration through the boundary affect pedestal fuelling?",
            "What boundary plasma challenges are anticipated for long-pulse reactor operation?",
        ],
        [
            "粒子和能量跨越分界面进入刮削层的输运由哪些过程决定?",
            "等离子体丝状结构如何贡献边界区的跨场输运?",
            "台基在决定高约束模式整体约束性能中起什么作用?",
            "鞘层边界条件如何影响等离子体与壁的相互作用?",
            "L-H转换功率阈值由什么决定?",
            "刮削层流动如何测量,它为何对杂质迁移很重要?",
            "剥离气球模理论在理解台基稳定性方面取得了哪些进展?",
            "雪花位形和超X偏滤器等位形如何改变边界等离子体行为?",
            "中性粒子穿透边界对台基加料有什么影响?",
            "长脉冲聚变堆运行在边界等离子体方面会面临哪些挑战?",
        ],
    ),
    (
        "other generalized questions",
        "general",
        [
            "What are the main engineering obstacles between present tokamaks and a demonstration fusion power plant?",
            "How does magnetic confinement fusion compare with inertial confinement in physics requirements?",
            "Why is tritium breeding essential for deuterium-tritium reactors, and how will blankets achieve it?",
            "What is the significance of the fusion triple product as a figure of merit?",
            "How do stellarators avoid the current-driven instabilities seen in tokamaks?",
            "What safety and licensing questions distinguish fusion plants from fission plants?",
            "How is fusion gain defined and what has been achieved experimentally?",
            "What materials research is needed for components facing 14 MeV neutron fluxes?",
            "What role can compact high-field tokamaks play in accelerating fusion development?",
            "How do superconducting magnets enable long-pulse tokamak operation?",
        ],
        [
            "当前托卡马克与示范聚变电站之间主要的工程障碍有哪些?",
            "磁约束聚变与惯性约束聚变在物理要求上有什么差异?",
            "为什么氚增殖对氘氚聚变堆至关重要,包层如何实现氚增殖?",
            "聚变三乘积作为品质因数有什么意义?",
            "仿星器如何避免托卡马克中由电流驱动的不稳定性?",
            "聚变电站在安全与许可方面与裂变电站有哪些不同?",
            "聚变增益如何定义,实验上已达到什么水平?",
            "面对14 MeV中子通量的部件需要哪些材料研究?",
            "紧凑型高场托卡马克在加速聚变发展中能起什么作用?",
            "超导磁体如何支撑托卡马克长脉冲运行?",
        ],
    ),
]

COUNTS = [19, 19, 19, 19, 18, 18, 18, 18, 18, 18]


def build_items() -> list[dict]:
    items = []
    for (topic, slug, en, zh), count in zip(TOPIC_BANKS, COUNTS):
        interleaved: list[tuple[str, str]] = []
        for q_en, q_zh in zip(en, zh):
            interleaved.append((q_en, "en"))
            interleaved.append((q_zh, "zh"))
        assert len(interleaved) >= count, topic
        for ordinal, (question, lang) in enumerate(interleaved[:count], start=1):
            items.append(
                {
                    "id": f"{slug}-{ordinal:03d}",
                    "topic": topic,
                    "question": question,
                    "lang": lang,
                    "placeholder": True,
                }
            )
    return items


def main() -> None:
    items = build_items()
    assert len(items) == 184, len(items)
    out = Path(__file__).resolve().parents[1] / "src" / "fusionkit" / "data" / "questionnaire.jsonl"
    with open(out, "w", encoding="utf-8") as fh:
        for item in items:
            fh.write(json.dumps(item, ensure_ascii=False) + "\n")
    print(f"wrote {len(items)} items to {out}")


if __name__ == "__main__":
    main()
