"""Smoke test for the qpot extension module."""

import math

import qpot


def close(a, b, tol):
    assert abs(a - b) <= tol * max(1.0, abs(b)), (a, b)


def main():
    # Oscillator eigenstates: <Q_n> = (2n+1)/4 with dq0 = 1/sqrt(2), hbar = M = 1.
    for n in range(4):
        s = qpot.PolarState.ho(n, dq0=math.sqrt(0.5))
        close(s.norm, 1.0, 1e-8)
        close(s.mvqp(), (2 * n + 1) / 4, 1e-5)
        lo, hi = s.linear_bound()
        close(hi, 1.0 / (4 * (2 * n + 1)), 1e-5)
        assert s.theorem2_bound() <= s.mvqp() + 1e-9

    # Ground state saturates the bound at T0 = q.
    g = qpot.PolarState.ho(0, dq0=math.sqrt(0.5))
    t0 = [p[0] for p in g.points()]
    close(g.bound(t0), g.mvqp(), 1e-6)

    # A chirped Gaussian is a minimum uncertainty state only in the quantum part.
    c = qpot.PolarState.gaussian(0.7, mean=0.2, momentum=0.9, chirp=0.3)
    cov = c.covariance()
    close(cov["vc"][0][0], 0.09 * 0.7, 1e-6)
    assert cov["rsur_pass"]

    # Poschl-Teller closed forms in units hbar^2/2m = 1.
    for mu, n, bound, mvqp in qpot.figure1([3, 6], [1, 3]):
        close(mvqp, mu * mu / (2 * mu + 1), 1e-12)
        assert bound <= mvqp + 1e-12
        if n == 1:
            close(bound, mvqp, 1e-10)
    rows = qpot.figure2(list(range(1, 11)))
    diffs = [r[3] for r in rows]
    assert all(d > 0 for d in diffs)
    assert all(b < a for a, b in zip(diffs, diffs[1:]))
    pt = qpot.PolarState.poschl_teller(3, 3, hbar=1.0)
    close(pt.mvqp(2.0), 9 / 7, 1e-5)

    # Thermal mixture against coth(x/2).
    q, closed, k = qpot.thermal_mvqp(1.0)
    close(q, closed, 1e-3)
    assert k >= 19

    try:
        qpot.PolarState.ho(0, dq0=-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative width accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
