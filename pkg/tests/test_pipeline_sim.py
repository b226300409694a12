"""Tests for the cycle-accurate core model: configuration invariants,
latency accounting, hazard behavior, and bit-exactness against the slow
oracles on a sample of runs (the full statistical sweep is in
test_acceptance.py)."""

import dataclasses
import random

import pytest

from kdntt.core_arith import SCHEMES
from kdntt.ntt_reference import (
    DOMAIN_NTT_BR,
    Polynomial,
    reference_pwm,
    schoolbook_negacyclic,
)
from kdntt.bfu import fast_intt, fast_ntt
from kdntt.memory_map import DESIGNS
from kdntt.pipeline_sim import (
    OP_INTT,
    OP_NTT,
    OP_POLYMUL,
    OP_PWM,
    SIM_OPS,
    CoreConfig,
    SimReport,
    latency_model,
    run_op,
    run_polymul,
)

RNG = random.Random(0x515)

# (design, scheme) -> published busy cycles for ntt / intt / pwm / polymul
PUBLISHED_LATENCY = {
    ("standalone-kyber", "kyber"): (448, 448, 256, 1152),
    ("standalone-dilithium", "dilithium"): (1024, 1024, 256, 2304),
    ("d1", "kyber"): (448, 448, 256, 1152),
    ("d1", "dilithium"): (1024, 1024, 256, 2304),
    ("d2", "kyber"): (224, 224, 128, 576),
    ("d2", "dilithium"): (512, 512, 128, 1152),
    ("d3", "kyber"): (112, 112, 64, 288),
    ("d3", "dilithium"): (256, 256, 64, 576),
}


def test_for_design_matches_shipped_table():
    cfg = CoreConfig.for_design("d2")
    assert (cfg.kyber_bfus, cfg.dilithium_bfus, cfg.pipeline_depth) == (4, 2, 15)
    assert CoreConfig.for_design("standalone-kyber").pipeline_depth == 11
    assert CoreConfig.for_design("d3").pipeline_depth == 8
    assert CoreConfig.for_design("d1").schemes == ("kyber", "dilithium")
    assert CoreConfig.for_design("standalone-dilithium").schemes == ("dilithium",)


def test_config_validation():
    with pytest.raises(ValueError):
        CoreConfig.for_design("d4")
    with pytest.raises(ValueError):
        CoreConfig(design="d2", kyber_bfus=8, dilithium_bfus=2, pipeline_depth=15)
    with pytest.raises(ValueError):
        CoreConfig.for_design("d2", pipeline_depth=0)
    # bound is half the smallest region depth: d3 kyber has d=16 -> max 8
    with pytest.raises(ValueError):
        CoreConfig.for_design("d3", pipeline_depth=9)
    assert CoreConfig.for_design("d3", pipeline_depth=8).pipeline_depth == 8


def test_latency_model_published_values():
    for (design, scheme), row in PUBLISHED_LATENCY.items():
        cfg = CoreConfig.for_design(design)
        got = tuple(latency_model(cfg, scheme, op)
                    for op in (OP_NTT, OP_INTT, OP_PWM, OP_POLYMUL))
        assert got == row, (design, scheme, got)


def test_measured_busy_equals_model():
    for (design, scheme), row in PUBLISHED_LATENCY.items():
        cfg = CoreConfig.for_design(design)
        a = Polynomial.random(scheme, RNG)
        b = Polynomial.random(scheme, RNG)
        p = SCHEMES[scheme]
        fa, fb = fast_ntt(a, p), fast_ntt(b, p)
        for op, operand, second, want in (
                (OP_NTT, a, None, row[0]),
                (OP_INTT, fa, None, row[1]),
                (OP_PWM, fa, fb, row[2])):
            _, rep = run_op(cfg, scheme, op, operand, second)
            assert rep.busy_cycles == want
        _, rep = run_polymul(cfg, scheme, a, b)
        assert rep.busy_cycles == row[3]


def test_latency_is_data_independent():
    cfg = CoreConfig.for_design("d2")
    reports = []
    for seed in (1, 2):
        rng = random.Random(seed)
        a = Polynomial.random("kyber", rng)
        b = Polynomial.random("kyber", rng)
        _, rep = run_polymul(cfg, "kyber", a, b)
        reports.append((rep.busy_cycles, rep.fill_drain_cycles))
    assert reports[0] == reports[1]


def test_fill_drain_accounting():
    # pipeline depth P costs P-1 idle cycles per drain; polymul drains
    # three times (after transforms, after pwm, after the inverse)
    for design in DESIGNS:
        cfg = CoreConfig.for_design(design)
        for scheme in cfg.schemes:
            a = Polynomial.random(scheme, RNG)
            _, rep = run_op(cfg, scheme, OP_NTT, a)
            assert rep.fill_drain_cycles == cfg.pipeline_depth - 1
            b = Polynomial.random(scheme, RNG)
            _, rep = run_polymul(cfg, scheme, a, b)
            assert rep.fill_drain_cycles == 3 * (cfg.pipeline_depth - 1)


def test_run_op_results_match_oracles():
    for design in ("d1", "d3"):
        cfg = CoreConfig.for_design(design)
        for scheme in cfg.schemes:
            p = SCHEMES[scheme]
            a = Polynomial.random(scheme, RNG)
            b = Polynomial.random(scheme, RNG)
            out, _ = run_op(cfg, scheme, OP_NTT, a)
            assert out.coeffs == fast_ntt(a, p).coeffs
            assert out.domain == DOMAIN_NTT_BR
            back, _ = run_op(cfg, scheme, OP_INTT, out)
            assert back.coeffs == a.coeffs
            fa, fb = fast_ntt(a, p), fast_ntt(b, p)
            pw, _ = run_op(cfg, scheme, OP_PWM, fa, fb)
            assert pw.coeffs == reference_pwm(fa, fb).coeffs


def test_run_polymul_matches_schoolbook():
    for design in DESIGNS:
        cfg = CoreConfig.for_design(design)
        for scheme in cfg.schemes:
            a = Polynomial.random(scheme, RNG)
            b = Polynomial.random(scheme, RNG)
            out, rep = run_polymul(cfg, scheme, a, b)
            assert out.coeffs == schoolbook_negacyclic(a, b).coeffs
            assert out.domain == "normal"
            assert not rep.hazards and rep.bfu_utilization == 1.0


def test_run_op_domain_and_scheme_guards():
    cfg = CoreConfig.for_design("d1")
    a = Polynomial.random("kyber", RNG)
    with pytest.raises(ValueError):
        run_op(cfg, "kyber", OP_INTT, a)          # normal-domain input
    with pytest.raises(ValueError):
        run_op(cfg, "kyber", OP_NTT, fast_ntt(a, SCHEMES["kyber"]))
    with pytest.raises(ValueError):
        run_op(cfg, "dilithium", OP_NTT, a)       # scheme mismatch
    with pytest.raises(ValueError):
        run_op(cfg, "kyber", OP_POLYMUL, a)       # not a single-pass op
    with pytest.raises(ValueError):
        run_op(CoreConfig.for_design("standalone-kyber"),
               "dilithium", OP_NTT, a)
    with pytest.raises(ValueError):
        run_op(cfg, "kyber", OP_PWM, fast_ntt(a, SCHEMES["kyber"]),
               a)                                  # second operand not spectral


def test_overdeep_pipeline_shows_hazards():
    """Falsification check: the simulator's hazard tracking is live.  A
    depth past d/2 (rejected by the constructor, forced here) must both
    flag hazards and corrupt the result."""
    cfg = CoreConfig.for_design("standalone-kyber")  # kyber d = 64
    object.__setattr__(cfg, "pipeline_depth", 33)
    a = Polynomial.random("kyber", RNG)
    with pytest.raises(RuntimeError):
        run_op(cfg, "kyber", OP_NTT, a)
    out, rep = run_op(cfg, "kyber", OP_NTT, a, allow_hazards=True)
    assert rep.hazards
    assert out.coeffs != fast_ntt(a, SCHEMES["kyber"]).coeffs


def test_deepest_legal_pipeline_is_clean():
    for design in DESIGNS:
        dg = DESIGNS[design]
        cfg = CoreConfig.for_design(design, pipeline_depth=dg.max_pipeline_depth)
        for scheme in cfg.schemes:
            a = Polynomial.random(scheme, RNG)
            b = Polynomial.random(scheme, RNG)
            out, rep = run_polymul(cfg, scheme, a, b)
            assert not rep.hazards
            assert out.coeffs == schoolbook_negacyclic(a, b).coeffs


def test_rom_override_identity_roundtrip():
    from kdntt.ntt_reference import basemul_zetas, forward_zetas, inverse_zetas
    cfg = CoreConfig.for_design("standalone-kyber")
    p = SCHEMES["kyber"]
    a = Polynomial.random("kyber", RNG)
    override = (forward_zetas(p), inverse_zetas(p), basemul_zetas(p))
    got, _ = run_op(cfg, "kyber", OP_NTT, a, rom_override=override)
    assert got.coeffs == fast_ntt(a, p).coeffs


def test_rom_override_corruption_changes_result():
    from kdntt.ntt_reference import basemul_zetas, forward_zetas, inverse_zetas
    cfg = CoreConfig.for_design("standalone-dilithium")
    p = SCHEMES["dilithium"]
    a = Polynomial.random("dilithium", RNG)
    fwd = list(forward_zetas(p))
    fwd[3] ^= 1
    override = (tuple(fwd), inverse_zetas(p), basemul_zetas(p))
    got, rep = run_op(cfg, "dilithium", OP_NTT, a, rom_override=override)
    assert not rep.hazards  # addressing is unaffected ...
    assert got.coeffs != fast_ntt(a, p).coeffs  # ... but the data is wrong


def test_report_text_format():
    cfg = CoreConfig.for_design("d3")
    a = Polynomial.random("kyber", RNG)
    _, rep = run_op(cfg, "kyber", OP_NTT, a)
    assert isinstance(rep, SimReport)
    text = rep.to_text()
    assert "op=ntt\n" in text
    assert "busy_cycles=112\n" in text
    assert "hazards=0\n" in text
    assert text.endswith("bram_estimate=5.5\n")


def test_sim_ops_tuple():
    assert SIM_OPS == ("ntt", "intt", "pwm")
    assert OP_POLYMUL not in SIM_OPS


def test_config_is_frozen():
    cfg = CoreConfig.for_design("d1")
    with pytest.raises(dataclasses.FrozenInstanceError):
        cfg.pipeline_depth = 3
