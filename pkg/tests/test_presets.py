import pytest

from sweepdyn.model import TABLE1
from sweepdyn.presets import (
    FIGURES,
    PRESET_NAMES,
    TABLE2,
    TABLE3,
    TABLE4,
    build_preset,
    dump_preset,
    golden_text,
)
from sweepdyn.reproduce import preset_config


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_golden_byte_match(name):
    assert dump_preset(build_preset(name)) == golden_text(name)


def test_unknown_preset():
    with pytest.raises(KeyError):
        build_preset("tk-table9")
    with pytest.raises(KeyError):
        golden_text("tk-table9")


def _phase_values(name, key):
    sched = preset_config(name).schedule
    return tuple(getattr(p, key) for _, p in sched.segments)


def test_table_values():
    assert preset_config("tk-baseline").schedule.segments[0][1] == TABLE1
    for name, table in (("tk-table2", TABLE2), ("tk-table3", TABLE3), ("tk-table4", TABLE4)):
        for key, (v2, v3) in table.items():
            assert _phase_values(name, key) == (getattr(TABLE1, key), v2, v3)
    assert _phase_values("tk-table2", "delta") == (0.1, 0.45, 0.95)
    assert _phase_values("tk-table3", "rho0") == pytest.approx((1.0, 1 / 3, 1 / 9))
    assert _phase_values("tk-table4", "b") == (0.05, 0.15, 0.45)
    # Untouched parameters stay at baseline in every regime.
    assert _phase_values("tk-table4", "kmax") == (3.0, 3.0, 3.0)


def test_tk_run_settings():
    cfg = preset_config("tk-table3")
    assert cfg.initial_state == (1.0, 0.0, 1.0)
    assert cfg.t_span == (1.0, 4000.0)
    assert len(cfg.output_grid) == 4000
    assert cfg.schedule.breakpoints == [1000.0, 2000.0]


def test_lv_presets():
    text = preset_config("lv-switched-text")
    code = preset_config("lv-switched-code")
    assert text.schedule.breakpoints == [500.0, 1000.0, 3000.0]
    assert code.schedule.breakpoints == [50.0, 100.0, 300.0]
    assert _phase_values("lv-switched-code", "gamma") == (0.1, 0.2, 0.3, 0.1)
    assert preset_config("lv-baseline").initial_state == (100.0, 100.0)


def test_figure_catalogue():
    assert list(FIGURES) == [f"fig{i}" for i in range(2, 12)]
    assert FIGURES["fig6"] == ("tk-table2", "series")
    assert FIGURES["fig3"] == ("lv-baseline", "phase")
    assert {p for p, _ in FIGURES.values()} <= set(PRESET_NAMES)
