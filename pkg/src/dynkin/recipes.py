"""Generators for the example chains: birth-death, lattice walk, four-state."""
import numpy as np

from . import numeric
from .errors import BadParameter
from .ctmc import validate_generator
from .resolvent import GameSpec
from .stopping import forward_optimal_stopping

__all__ = [
    "birth_death_generator",
    "gen_birth_death",
    "lattice_generator",
    "gen_lattice",
    "gen_four_state",
    "example_spec",
    "EXAMPLES",
]


def birth_death_generator(N, lam, r):
    if N < 2:
        raise BadParameter("birth-death chain needs N >= 2")
    if not (lam > 0 and r > 0):
        raise BadParameter("rates must be positive")
    Q = np.zeros((N, N))
    for i in range(N - 1):
        Q[i, i + 1] = lam
    for i in range(1, N):
        Q[i, i - 1] = r
    Q[np.diag_indices(N)] = -Q.sum(axis=1)
    return Q


def _payoffs_birth_death(selector, N):
    x = np.arange(N, dtype=float)
    if selector in ("1.1", "1.2"):
        psi = 10 + x / 4 + 3 * np.cos(x) + 2 * np.sin(x / 2)
        if selector == "1.1":
            return psi, psi + 3
        return psi, psi + 4 * np.maximum(np.sin(x / 5) + 0.7, 0.0)
    if selector == "1.3":
        psi = np.maximum(x - 25, 0.0)
        return psi, psi + 5
    raise BadParameter(f"unknown birth-death payoff selector {selector!r}")


def gen_birth_death(N, lam, r, beta, selector):
    """Reflecting birth-death chain on ``0..N-1`` with one of the payoff pairs
    ``1.1``, ``1.2`` or ``1.3``."""
    psi, phi = _payoffs_birth_death(str(selector), N)
    return GameSpec.build(birth_death_generator(N, lam, r), beta, psi, phi)


def lattice_generator(N, r, absorbing_axis="j"):
    """Nearest-neighbour walk on an ``N x N`` grid, state ``p = i + j*N``.

    Each non-absorbing node jumps at rate ``r`` to every grid neighbour;
    moves that would leave the grid are dropped.  The two boundary lines of
    ``absorbing_axis`` are absorbing: ``"j"`` freezes ``j = 0`` and
    ``j = N-1`` (states ``0..N-1`` and ``N*N-N..N*N-1``), ``"i"`` freezes
    ``i = 0`` and ``i = N-1``.
    """
    if N < 3:
        raise BadParameter("lattice needs N >= 3")
    if not r > 0:
        raise BadParameter("rate must be positive")
    if absorbing_axis not in ("i", "j"):
        raise BadParameter(f"absorbing_axis must be 'i' or 'j', got {absorbing_axis!r}")
    n = N * N
    Q = np.zeros((n, n))
    for j in range(N):
        for i in range(N):
            if (i if absorbing_axis == "i" else j) in (0, N - 1):
                continue
            for a, b in ((i + 1, j), (i - 1, j), (i, j + 1), (i, j - 1)):
                if 0 <= a < N and 0 <= b < N:
                    Q[i + j * N, a + b * N] = r
    Q[np.diag_indices(n)] = -Q.sum(axis=1)
    return Q


def gen_lattice(N, r, beta, selector, delta=8.0, absorbing_axis="j"):
    """Lattice game: selector ``2.1`` (``phi = psi + delta``) or ``2.2`` (``phi = 1.5 psi``)."""
    x = np.arange(N * N, dtype=float)
    psi = np.maximum(x - N * N / 2, 0.0)
    if str(selector) == "2.1":
        phi = psi + delta
    elif str(selector) == "2.2":
        phi = 1.5 * psi
    else:
        raise BadParameter(f"unknown lattice payoff selector {selector!r}")
    return GameSpec.build(lattice_generator(N, r, absorbing_axis), beta, psi, phi)


def gen_four_state(case, exact=False):
    """Four-state birth-death chain (all rates 1, beta = 0.2).

    ``case="equal"``: psi = (10, 4, 2, 1), phi = (12, 8, V0(2), 1).
    ``case="neq"``: psi = (4, 7, 0, 5), phi = (5, 10, V0(2), V0(3)).
    ``V0`` is computed, not copied from rounded decimals.
    """
    gen = validate_generator(birth_death_generator(4, 1.0, 1.0), exact=exact)
    beta = numeric.scalar("1/5" if exact else 0.2, exact=exact)
    if case == "equal":
        psi, phi, copy = [10, 4, 2, 1], [12, 8, 0, 1], (2,)
    elif case == "neq":
        psi, phi, copy = [4, 7, 0, 5], [5, 10, 0, 0], (2, 3)
    else:
        raise BadParameter(f"unknown four-state case {case!r}")
    psi = numeric.as_array(psi, exact=exact)
    phi = numeric.as_array(phi, exact=exact)
    v0 = forward_optimal_stopping(gen, beta, psi).value
    for x in copy:
        phi[x] = v0[x]
    return GameSpec.build(gen, beta, psi, phi)


EXAMPLES = {
    "birth-death-1": lambda exact=False: gen_birth_death(50, 40.0, 28.0, 0.1, "1.1"),
    "birth-death-2": lambda exact=False: gen_birth_death(50, 40.0, 28.0, 0.1, "1.2"),
    "birth-death-3": lambda exact=False: gen_birth_death(50, 14.0, 12.0, 0.05, "1.3"),
    "lattice-1": lambda exact=False: gen_lattice(13, 5.0, 0.05, "2.1", delta=8.0),
    "lattice-2": lambda exact=False: gen_lattice(13, 500.0, 1.0, "2.2"),
    "four-state-equal": lambda exact=False: gen_four_state("equal", exact),
    "four-state-neq": lambda exact=False: gen_four_state("neq", exact),
}


def example_spec(name, exact=False):
    try:
        factory = EXAMPLES[name]
    except KeyError:
        raise BadParameter(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None
    return factory(exact)
