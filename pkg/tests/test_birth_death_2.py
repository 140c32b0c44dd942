"""Diagnostics for the phi = psi + 4 (sin(x/5) + 0.7)_+ birth-death game.

The listed S1 cannot be reproduced from V0 (states 5 and 14 have
V0 <= phi).  These tests pin down that everything downstream of S1 does
match once the listed S1 is used as the starting set.
"""
import numpy as np

from dynkin import defect, forward_optimal_stopping, solve_game
from dynkin.recipes import example_spec
from test_acceptance import BD_1_2


def run_from(spec, S1):
    eq = spec.equal_set()
    S, out = frozenset(S1), []
    while True:
        res = forward_optimal_stopping(spec.Q, spec.beta, spec.psi, S, spec.phi, spec.tol)
        out.append((S, res.stop_set))
        d = defect(spec.Q, spec.beta, res.value)
        nxt = frozenset(x for x in S if d[x] >= -spec.tol) | eq
        if nxt == S:
            return out
        S = nxt


def test_listed_s1_reproduces_later_s_sets():
    spec = example_spec("birth-death-2")
    out = run_from(spec, BD_1_2["S"][0])
    assert len(out) == 4
    assert [s for s, _ in out] == BD_1_2["S"]


def test_listed_d_sets_differ_only_on_equal_states():
    spec = example_spec("birth-death-2")
    eq = spec.equal_set()
    out = run_from(spec, BD_1_2["S"][0])
    for (_, D), listed in zip(out, BD_1_2["D"]):
        assert D == listed - eq
    # the listing puts {phi = psi} states into D, although every S_k contains them
    assert all(listed & eq for listed in BD_1_2["D"])


def test_missing_states_are_not_above_phi():
    spec = example_spec("birth-death-2")
    v0 = solve_game(spec).trace.v0_result.value
    for x in (5, 14):
        assert v0[x] < spec.phi[x] - spec.tol
        assert spec.phi[x] > spec.psi[x]


def test_own_run_reaches_listed_s3_and_s4():
    sol = solve_game(example_spec("birth-death-2"))
    assert sol.outer_iterations == 4
    assert [r.inf_set for r in sol.trace.outer[2:]] == BD_1_2["S"][2:]
    assert np.all(np.asarray(sol.value) >= example_spec("birth-death-2").psi - 1e-9)
