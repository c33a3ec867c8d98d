"""Shared oracles and frozen reference constants for the test suite.

The constants below were computed by independent routes (tight bisection
on the closed-form advantage sign, determinant algebra done by hand,
classical-limit formulas) before the library was written. Tests compare
the library against these, not against itself.
"""

import numpy as np

# --- frozen reference values ------------------------------------------------

# sign-change bisection at 1e-9 absolute on the closed-form delta
TH3_BALANCED = 8.150914618279785         # threshold budget, taus (1/2, 1/2)
TH4_BALANCED = 24.867118126247078        # threshold budget, taus (1/2, 1/2, 1/2)
MIN_TH3 = 5.376816293690354              # global minimum, attained at (1/2, 0)
MIN_TH4 = 11.451757172588259             # global minimum, attained at (1/2, 0, 0)

# optimal squeezing evaluated exactly at the thresholds above
BREAK_EVEN3 = 1.1069269162869388
BREAK_EVEN4 = 1.4333263001057863

# capacity ratios at the budget nbar = (n-1) e^r sinh(r) for r = 20;
# they sit about 2 percent below the n/(n-1) limits
RATIO3_R20 = 1.4681384589510356
RATIO4_R20 = 1.3069600695604664

CAP3_BALANCED_815 = 5.037127048268097    # C(3 modes, (1/2,1/2), nbar=8.15), nats
CLASSICAL_2_815 = 5.037217642471155      # two-sender classical rate at 8.15
CLASSICAL_3_AT_3 = 6.0 * np.log(2.0)     # three senders, nbar=3: exactly 6 ln 2

# balanced-vs-(1/3, 1/2) capacity ordering flips below this budget
ORDERING_CROSSOVER3 = np.sqrt(10.0) - 1.0


# --- closed-form capacity oracles --------------------------------------------

def gain3(nbar):
    return nbar * (nbar + 2.0) / 3.0


def gain4(nbar):
    return nbar * (nbar + 3.0) / 6.0


def signal_gain(n_modes, nbar):
    """e^{2r} sigma^2 at the optimal working point."""
    return 2.0 * nbar * (nbar + n_modes - 1.0) / ((n_modes - 1.0) * n_modes)


def capacity3_closed(tau1, tau2, nbar):
    g = gain3(nbar)
    return 0.5 * np.log(
        (1 + 2 * g) * (1 + 2 * g * (1 - tau1)) * (1 + 2 * g * tau1 * (1 - tau2))
    )


def capacity4_closed(tau1, tau2, tau3, nbar):
    g = gain4(nbar)
    det13 = (1 + 2 * g) * (1 + 2 * g * tau1 * (1 - tau2))
    det24 = (1 + 2 * g * (1 - tau1)) * (1 + 2 * g * (1 - tau3)) \
        + 2 * g * tau1 * tau3 * (1 - tau2)
    return 0.5 * np.log(det13 * det24)


def capacity3_balanced_closed(nbar):
    a = nbar * (nbar + 2.0)
    return 0.5 * np.log((a + 3) * (a + 6) * (2 * a + 3) / 54.0)


def capacity4_balanced_closed(nbar):
    b = nbar * (nbar + 3.0)
    return 0.5 * np.log((b + 3) * (b + 12) * (b * (2 * b + 27) + 72)) \
        - np.log(36.0 * np.sqrt(2.0))


def capacity4_mixed_closed(nbar):
    # taus (1/3, 1/4, 4/5)
    b = nbar * (nbar + 3.0)
    return 0.5 * np.log((b + 3) * (b + 12) * (2 * b * (b + 24) + 135)) \
        - np.log(18.0 * np.sqrt(15.0))


def classical_stable(n_senders, nbar):
    x = np.asarray(nbar, dtype=float) / n_senders
    with np.errstate(divide="ignore", invalid="ignore"):
        val = n_senders * (x * np.log1p(1.0 / x) + np.log1p(x))
    return np.where(x > 0, val, 0.0)


def classical_literal(n_senders, nbar):
    """Textbook form (1+x)ln(1+x) - x ln x; cancels badly for x >~ 1e15."""
    x = nbar / n_senders
    if x == 0:
        return 0.0
    return n_senders * ((1 + x) * np.log(1 + x) - x * np.log(x))


def mi_oracle(m, gain):
    """Mutual information from a channel matrix and the scalar gain."""
    m = np.asarray(m, dtype=float)
    _, logdet = np.linalg.slogdet(np.eye(m.shape[0]) + gain * (m @ m.T))
    return 0.5 * logdet


# --- decoded-mean oracles -----------------------------------------------------

def decoded_mean_three(alpha, tau1, tau2):
    """Decoded displacement of the encoded three-mode resource,
    components (q1, p1, q2, p2, q3, p3), message order (a1x, a1y, a2y)."""
    a1x, a1y, a2y = alpha
    s = np.sqrt
    return np.array([
        s(2 * tau1) * a1x,
        s(2 * tau1) * a1y + s(2 * tau2 * (1 - tau1)) * a2y,
        s(2 * (1 - tau1)) * a1x,
        s(2 * (1 - tau1)) * a1y - s(2 * tau1 * tau2) * a2y,
        0.0,
        s(2 * (1 - tau2)) * a2y,
    ])


def decoded_measured_mean_four(alpha, tau1, tau2, tau3):
    """Measured-quadrature means (p1, q2, p3, q4) after decoding a
    four-mode network, message order (a1x, a1y, a2y, a3x)."""
    a1x, a1y, a2y, a3x = alpha
    s = np.sqrt
    return np.array([
        s(2 * tau1) * a1y + s(2 * tau2 * (1 - tau1)) * a2y,
        s(2 * (1 - tau1)) * a1x - s(2 * tau1 * tau3 * (1 - tau2)) * a3x,
        s(2 * (1 - tau2)) * a2y,
        s(2 * (1 - tau3)) * a3x,
    ])


# --- literal (overflow-prone) boundary formulas -------------------------------
# valid for nbar <= ~75; the library must match them there exactly

def _excess3(nbar):
    return nbar ** (-2.0 * nbar) * (nbar + 2.0) ** (2.0 * nbar + 4.0) / 16.0


def _excess4(nbar):
    return nbar ** (-2.0 * nbar) * (nbar + 3.0) ** (2.0 * nbar + 6.0) / 729.0


def boundary3_tau1_literal(nbar):
    g = gain3(nbar)
    disc = (1 + g) ** 2 - _excess3(nbar) / (1 + 2 * g)
    if disc < 0:
        return None
    half = np.sqrt(disc) / (2 * g)
    return 0.5 - half, 0.5 + half


def boundary3_tau2_literal(nbar, tau1):
    g = gain3(nbar)
    e = _excess3(nbar) / ((1 + 2 * g) * (1 + 2 * g * (1 - tau1)))
    return 1.0 + (1.0 - e) / (2 * g * tau1)


def boundary4_tau1_literal(nbar):
    g = gain4(nbar)
    disc = (1 + g) ** 2 - _excess4(nbar) / (1 + 2 * g) ** 2
    if disc < 0:
        return None
    half = np.sqrt(disc) / (2 * g)
    return 0.5 - half, 0.5 + half


def boundary4_tau2_literal(nbar, tau1):
    g = gain4(nbar)
    e = _excess4(nbar) / ((1 + 2 * g) ** 2 * (1 + 2 * g * (1 - tau1)))
    return 1.0 + (1.0 - e) / (2 * g * tau1)


def boundary4_tau3_literal(nbar, tau1, tau2):
    g = gain4(nbar)
    f = _excess4(nbar) / ((1 + 2 * g) * (1 + 2 * g * tau1 * (1 - tau2)))
    shared = 1 + 2 * g * (1 - tau1)
    return (shared * (1 + 2 * g) - f) / (2 * g * (shared - tau1 * (1 - tau2)))


# --- generic utilities ---------------------------------------------------------

def bisect_root(f, lo, hi, tol=1e-10):
    """Root of f by bisection; f(lo) and f(hi) must differ in sign."""
    flo = f(lo)
    if flo == 0:
        return lo
    if f(hi) * flo > 0:
        raise ValueError("root not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) * flo > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_symplectic(rng, n_modes, max_ops=6, max_r=1.5):
    """Random composition of squeezers and beam splitters."""
    from cvdcnet import Quadrature, beam_splitter, single_mode_squeezer

    s = single_mode_squeezer(n_modes, 0, 0.0, Quadrature.POSITION)
    for _ in range(int(rng.integers(1, max_ops + 1))):
        if n_modes > 1 and rng.uniform() < 0.5:
            i, j = rng.choice(n_modes, size=2, replace=False)
            s = beam_splitter(n_modes, int(i), int(j), float(rng.uniform())) @ s
        else:
            quad = Quadrature.POSITION if rng.uniform() < 0.5 else Quadrature.MOMENTUM
            mode = int(rng.integers(n_modes))
            s = single_mode_squeezer(
                n_modes, mode, float(rng.uniform(-max_r, max_r)), quad
            ) @ s
    return s
