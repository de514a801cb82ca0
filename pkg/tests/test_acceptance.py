"""Acceptance gate: every headline criterion at its stated tolerance.

Each test asserts the criterion directly against the library and finishes by
printing one pass line (run pytest with -s to see them).  The same checks
back the CLI demo suite; here the key numbers are also re-asserted inline so
a regression cannot hide behind report plumbing.
"""

import time

import numpy as np

from superchannels import demo
from superchannels.channels import random_channel
from superchannels.extend import extend_action, tp_extension
from superchannels.extremal import (
    ConstraintSpaces,
    extension_constraint_spaces,
    is_extreme_choi,
    is_extreme_constrained,
    perturbation_search,
)
from superchannels.gallery import (
    block_trace_readout,
    entry_readout,
    no_tp_action,
    no_tp_superchannel,
    readout_mixture,
)
from superchannels.linalg import frob
from superchannels.opsys import span_basis, span_dim, tensor_dimension_gap
from superchannels.report import PASS
from superchannels.supermaps import (
    as_channel,
    aux_dim,
    identity_superchannel,
    marginal,
    restrictions_equal,
    tensor_superchannels,
)

_START = time.perf_counter()


def _passed(label: str) -> None:
    print(f"[PASS] {label}")


def test_criterion_01_dimension_formula():
    start = time.perf_counter()
    for d in (1, 2, 3):
        for r in (1, 2, 3):
            assert len(span_basis(d, r)) == d * d * r * r - d * d + 1
    assert time.perf_counter() - start < 1.0
    _passed("criterion 1: basis sizes match d^2 r^2 - d^2 + 1 on {1,2,3}^2, < 1 s")


def test_criterion_02_tensor_inclusion_gap():
    start = time.perf_counter()
    assert tensor_dimension_gap(2, 2, 2, 2) == 72
    assert span_dim(4, 4) - span_dim(2, 2) ** 2 == 241 - 169
    report = demo.check_tensor_gap()
    values = {f.key: f.value for f in report.results}
    assert values["rank of product span"] == 169
    assert values["rank of joint span"] == 241
    assert report.status == PASS
    assert time.perf_counter() - start < 10.0
    _passed("criterion 2: tensor gap 241 - 169 = 72 cross-checked by explicit ranks, < 10 s")


def test_criterion_03_nonunique_extension():
    start = time.perf_counter()
    g1, g2 = block_trace_readout(0), block_trace_readout(1)
    assert abs(frob(g1.choi - g2.choi) - 2.0) <= 1e-12
    assert restrictions_equal(g1, g2, 1e-10)
    assert time.perf_counter() - start < 1.0
    _passed("criterion 3: distinct supermaps (Frobenius distance 2) with equal restriction to 1e-10")


def test_criterion_04_marginal_ranks():
    g1, g2 = block_trace_readout(0), block_trace_readout(1)
    assert aux_dim(g1) == 1 and aux_dim(g2) == 1
    assert np.max(np.abs(marginal(g1) - np.diag([2.0, 0.0]))) <= 1e-12
    assert np.max(np.abs(marginal(g2) - np.diag([0.0, 2.0]))) <= 1e-12
    for p in (0.25, 0.5, 0.75):
        mix = readout_mixture(p)
        assert aux_dim(mix) == 2
        assert np.max(np.abs(marginal(mix) - np.diag([2 * p, 2 - 2 * p]))) <= 1e-12
    _passed("criterion 4: aux dims 1/1/2 with marginals diag(2,0), diag(0,2), diag(2p, 2-2p) to 1e-12")


def test_criterion_05_no_tp_extension():
    start = time.perf_counter()
    action = no_tp_action()
    tp_report = tp_extension(action)
    assert tp_report.status == "infeasible"
    assert tp_report.gap > 1e-6
    cp_report = extend_action(action)
    assert cp_report.status == "feasible"
    seeded = extend_action(action, seed_point=no_tp_superchannel())
    assert seeded.status == "feasible"
    assert frob(seeded.witness.choi - no_tp_superchannel().choi) <= 1e-8
    assert time.perf_counter() - start < 60.0
    _passed("criterion 5: TP extension infeasible (gap > 1e-6), CP extension feasible "
            "with the diagonal witness to 1e-8, < 60 s")


def test_criterion_06_tensor_pathology():
    start = time.perf_counter()
    sa, sb = entry_readout(0), entry_readout(1)
    assert restrictions_equal(sa, sb, 1e-10)
    ident = identity_superchannel(2, 2)
    assert not restrictions_equal(tensor_superchannels(ident, sa),
                                  tensor_superchannels(ident, sb), 1e-10)
    assert time.perf_counter() - start < 5.0
    _passed("criterion 6: equal actions on the small span, unequal after tensoring, < 5 s")


def test_criterion_07_pre_post_round_trip():
    report = demo.check_pre_post_roundtrip()
    values = {f.key: f for f in report.results}
    assert values["aux dim never exceeds the generator"].value is True
    assert values["worst isometry residual"].value <= 1e-9
    assert values["worst action disagreement"].value <= 1e-8
    _passed("criterion 7: 20 generated superchannels re-factored with e <= generator e, "
            "isometry residual <= 1e-9, action agreement <= 1e-8")


def test_criterion_08_induced_map_identity():
    report = demo.check_induced_map_identity()
    for f in report.results:
        assert f.value <= 1e-9, f.key
    _passed("criterion 8: marginal factorisation, unitality and double-marginal identity to 1e-9")


def test_criterion_09_scale_preservation():
    report = demo.check_scale_preservation()
    assert report.status == PASS
    worst = next(f for f in report.results if f.key == "worst scale drift")
    assert worst.value <= 1e-9
    _passed("criterion 9: trace-scaling factor preserved to 1e-9 across fixtures and basis")


def test_criterion_10_unitary_superchannels():
    report = demo.check_unitary_superchannels()
    values = {f.key: f for f in report.results}
    assert values["product conjugations all verified"].value is True
    assert values["worst factor recovery"].value <= 1e-8
    assert values["non-product conjugations all rejected"].value is True
    _passed("criterion 10: 20 product conjugations verified (aux dim 1, order unit, factors "
            "to 1e-8); 20 non-product conjugations rejected")


def test_criterion_11_extremality():
    spaces = extension_constraint_spaces(2, 2)
    assert is_extreme_constrained(as_channel(block_trace_readout(0)), spaces)
    assert is_extreme_constrained(as_channel(block_trace_readout(1)), spaces)
    assert not is_extreme_constrained(as_channel(readout_mixture(0.5)), spaces)
    fixed_unit = ConstraintSpaces((np.eye(2, dtype=complex),), ())
    rng = np.random.default_rng(4242)
    for k in range(20):
        phi = random_channel(2, 2, 1 + (k % 4), rng)
        assert is_extreme_choi(phi) == is_extreme_constrained(phi, fixed_unit)
        if k < 8:
            assert perturbation_search(phi, fixed_unit) == \
                is_extreme_constrained(phi, fixed_unit)
    for sc in (block_trace_readout(0), block_trace_readout(1), readout_mixture(0.5)):
        assert perturbation_search(as_channel(sc), spaces) == \
            is_extreme_constrained(as_channel(sc), spaces)
    _passed("criterion 11: readout extensions extreme, midpoint not; rank test agrees with "
            "the fixed-unit specialisation and the perturbation search")


def test_criterion_12_property_gate():
    report = demo.check_property_gate()
    values = {f.key: f for f in report.results}
    assert values["worst Choi/Kraus round trip"].value <= 1e-9
    assert values["projection optimality spot check"].value is True
    assert values["worst span decomposition residual"].value <= 1e-9
    _passed("criterion 12: 100 Choi/Kraus round trips <= 1e-9, projection optimality, "
            "50 span decompositions <= 1e-9")


def test_full_suite_runs_quickly():
    elapsed = time.perf_counter() - _START
    assert elapsed < 300.0
    _passed(f"acceptance module wall clock {elapsed:.1f} s < 300 s")
