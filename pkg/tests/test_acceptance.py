"""Acceptance checks, one test per criterion.

Each test prints a single ``criterion N (...): PASS|FAIL - detail`` line (also
when run as ``python3 tests/test_acceptance.py``) and then asserts the
criterion exactly as stated, with no loosened tolerances.
"""

import os
import subprocess
import sys
import tempfile
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conftest import log_uniform, random_params  # noqa: E402
from quasifrac.asymptotic import convergence_report, count_G_inf_zeros, real_zero_G_k  # noqa: E402
from quasifrac.errors import NotAligned, NumericalFailure  # noqa: E402
from quasifrac.exppoly import find_unique_positive_zero, grid_crossings, new_exppoly  # noqa: E402
from quasifrac.fracsum import (  # noqa: E402
    deriv_coeffs,
    deriv_sign,
    eval_deriv_scaled,
    eval_f,
    new_params,
    tau_bounds,
)
from quasifrac.rootlocus import certify_unimodal, default_x_max, grid_argmin, minimize  # noqa: E402
from quasifrac.semiblind import (  # noqa: E402
    HermitianPair,
    mse,
    new_model,
    optimal_lambda,
    spectral_from_matrices,
)

NAMES = {
    1: "unimodality certificates",
    2: "derivative closed form and recurrences",
    3: "zero bracket soundness",
    4: "minimizer vs grid oracle",
    5: "exponential polynomial unique zero",
    6: "G_k -> G_inf convergence",
    7: "G_inf zero count on adaptive rectangle",
    8: "MSE reduction and closed forms",
    9: "matrix ingestion round trip",
    10: "CLI determinism and exit codes",
}


def report(n, ok, detail, capsys=None):
    line = f"criterion {n} ({NAMES[n]}): {'PASS' if ok else 'FAIL'} - {detail}"
    if capsys is None:
        print(line)
    else:
        with capsys.disabled():
            print("\n" + line)
    return ok


def check_1():
    rng = np.random.default_rng(1001)
    start = time.perf_counter()
    failed = []
    for i in range(1000):
        cert = certify_unimodal(random_params(rng))
        if not cert.passed:
            failed.append((i, cert.sign_changes_k1, cert.sign_changes_k2))
    elapsed = time.perf_counter() - start
    ok = not failed and elapsed < 60.0
    detail = f"{1000 - len(failed)}/1000 PASS in {elapsed:.1f}s"
    if failed:
        detail += f"; first failures (index, changes F', changes F''): {failed[:3]}"
    return ok, detail


def check_2():
    rng = np.random.default_rng(1002)
    worst_fd = 0.0
    for _ in range(100):
        p = random_params(rng)
        k = int(rng.integers(1, 6))
        lo, hi = tau_bounds(p)
        x = float(rng.uniform(k * lo, k * hi))
        h = 1e-5 * x
        fd = (eval_deriv_scaled(p, k - 1, x + h) - eval_deriv_scaled(p, k - 1, x - h)) / (2 * h)
        # d/dx of F^(k-1)/(2 (k-1)!) is k F^(k)/(2 k!), and F' = 2 * (F'/2)
        want = (2.0 if k == 1 else float(k)) * eval_deriv_scaled(p, k, x)
        worst_fd = max(worst_fd, abs(fd - want) / abs(want))

    worst_rec = 0.0
    for _ in range(20):
        p = random_params(rng)
        d = p.d_arr
        for k in range(1, 50):
            lo_c, hi_c = deriv_coeffs(p, k), deriv_coeffs(p, k + 1)
            a_k, b_k = np.array(lo_c.a_hat), np.array(lo_c.b_hat)
            a_n, b_n = np.array(hi_c.a_hat), np.array(hi_c.b_hat)
            # unnormalized b_{k+1} = (k+1) d b_k and a_{k+1} = b_k + (k+2) d a_k, divided by 2 (k+1)!
            rel_b = np.abs(b_n - d * b_k) / b_n
            rel_a = np.abs((k + 1) * a_n - (b_k + (k + 2) * d * a_k)) / ((k + 1) * a_n)
            worst_rec = max(worst_rec, float(rel_b.max()), float(rel_a.max()))
    ok = worst_fd <= 1e-5 and worst_rec <= 1e-12
    return ok, f"max FD rel err {worst_fd:.2e} (<= 1e-5), max recurrence rel err {worst_rec:.2e} (<= 1e-12)"


def check_3():
    rng = np.random.default_rng(1003)
    bad = 0
    for _ in range(200):
        p = random_params(rng)
        lo, hi = tau_bounds(p)
        for k in range(1, 11):
            inner = np.linspace(0.0, k * lo, 102)[1:-1]
            outer = np.linspace(k * hi, 4 * k * hi, 101)[1:]
            for probes in (inner, outer):
                if len(np.unique(deriv_sign(p, k, probes))) != 1:
                    bad += 1
    return bad == 0, f"{bad} of 4000 probe sets with a sign change"


def check_4():
    rng = np.random.default_rng(1004)
    worst_steps, worst_gap, bad = 0.0, -np.inf, 0
    for _ in range(100):
        p = random_params(rng)
        with np.errstate(all="ignore"):
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                x_star, f_star = minimize(p)
        gx, gf, step = grid_argmin(p, default_x_max(p), 1_000_000)
        steps = abs(x_star - gx) / step
        gap = (eval_f(p, x_star) - gf) / (1 + abs(gf))
        worst_steps, worst_gap = max(worst_steps, steps), max(worst_gap, gap)
        if steps > 2 or gap > 1e-10:
            bad += 1
    return bad == 0, f"{bad}/100 off; max |x*-grid| = {worst_steps:.2f} steps, max excess {worst_gap:.1e}"


def check_5():
    rng = np.random.default_rng(5)
    multi, far = [], 0
    for i in range(1000):
        n = int(rng.integers(1, 9))
        p = new_exppoly(log_uniform(rng, n), log_uniform(rng, n), log_uniform(rng, n))
        crossings, step = grid_crossings(p, 1_000_000)
        if len(crossings) != 1:
            multi.append((i, len(crossings)))
            continue
        if abs(find_unique_positive_zero(p) - crossings[0]) > 2 * step:
            far += 1
    ok = not multi and far == 0
    detail = f"{1000 - len(multi)}/1000 with exactly one sign change; solver off the grid crossing on {far}"
    if multi:
        detail += f"; first multi-zero instances (index, sign changes): {multi[:3]}"
    return ok, detail


def check_6():
    rng = np.random.default_rng(1006)
    worse = 0
    for _ in range(20):
        (_, e50), (_, e200) = convergence_report(random_params(rng), [50, 200])
        worse += not e200 < e50
    unit = new_params([1.0], [1.0])
    zero_err = max(abs(real_zero_G_k(unit, k, 1e-14) - 1.0) for k in (1, 10, 50, 200, 300))
    ok = worse == 0 and zero_err <= 1e-8
    return ok, f"err(200) < err(50) on {20 - worse}/20; c=d=1 zero of G_k off 1 by {zero_err:.1e}"


def check_7():
    rng = np.random.default_rng(1007)
    counts, worst_frac, errors = [], 0.0, 0
    for _ in range(100):
        p = random_params(rng)
        try:
            zc = count_G_inf_zeros(p)
        except NumericalFailure:
            errors += 1
            continue
        counts.append(zc.count)
        worst_frac = max(worst_frac, abs(zc.winding - zc.count))
    ones = counts.count(1)
    ok = ones == 100 and worst_frac <= 0.05
    hist = {c: counts.count(c) for c in sorted(set(counts))}
    detail = (
        f"count == 1 on {ones}/100 (histogram {hist}, {errors} numerical failures); "
        f"max distance of winding from an integer {worst_frac:.1e} (<= 0.05)"
    )
    return ok, detail


def check_8():
    rng = np.random.default_rng(1008)
    exact = True
    for _ in range(20):
        n = int(rng.integers(1, 9))
        gamma = float(log_uniform(rng, 1, -1, 1)[0])
        m = new_model(log_uniform(rng, n), log_uniform(rng, n), gamma)
        p = new_params([gamma * a for a in m.a_diag], [gamma * d for d in m.d_diag])
        lams = np.concatenate([[0.0], log_uniform(rng, 50)])
        exact &= bool(np.array_equal(mse(m, lams), eval_f(p, lams)))
    worst = 0.0
    for a, d in ((1.0, 1.0), (2.0, 3.0), (0.5, 0.2)):
        for gamma in (0.5, 1.0, 2.0, 4.0, 8.0):
            lam, val = optimal_lambda(new_model([a], [d], gamma), tol=1e-14)
            want = 1.0 / (1.0 + gamma * d * d / a)
            if a == d == 1.0:
                want = 1.0 / (1.0 + gamma)
            worst = max(worst, abs(lam - d / a) / (d / a), abs(val - want) / want)
    ok = exact and worst <= 1e-10
    return ok, f"mse == eval_f bit-for-bit: {exact}; max rel err of lambda*, MSE* {worst:.1e} (<= 1e-10)"


def check_9():
    rng = np.random.default_rng(1009)
    worst, aligned_errors = 0.0, 0
    for _ in range(20):
        n = int(rng.integers(1, 33))
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        u, r = np.linalg.qr(z)
        d = np.sort(log_uniform(rng, n, -1, 1))
        a = log_uniform(rng, n, -1, 1)
        pair = HermitianPair(u @ np.diag(d) @ u.conj().T, u @ np.diag(a) @ u.conj().T)
        m = spectral_from_matrices(pair)
        worst = max(worst, float(np.max(np.abs(np.array(m.d_diag) - d) / d)))
        worst = max(worst, float(np.max(np.abs(np.array(m.a_diag) - a) / a)))
    for _ in range(10):
        n = int(rng.integers(2, 33))
        z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        u, _ = np.linalg.qr(z)
        q = u @ np.diag(np.sort(log_uniform(rng, n, -1, 1))) @ u.conj().T
        v, _ = np.linalg.qr(rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        mm = v @ np.diag(log_uniform(rng, n, -1, 1)) @ v.conj().T
        try:
            spectral_from_matrices(HermitianPair(q, mm))
        except NotAligned:
            aligned_errors += 1
    ok = worst <= 1e-10 and aligned_errors == 10
    return ok, f"max rel recovery err {worst:.1e} (<= 1e-10); NotAligned raised on {aligned_errors}/10 misaligned pairs"


def _cli(*args):
    proc = subprocess.run([sys.executable, "-m", "quasifrac", *args], capture_output=True, check=False)
    return proc.returncode


def check_10():
    with tempfile.TemporaryDirectory() as tmp:
        def path(name, text=None):
            full = os.path.join(tmp, name)
            if text is not None:
                with open(full, "w", encoding="utf-8") as fh:
                    fh.write(text)
            return full

        cd = path("cd.csv", "c,d\n1,4\n2,1\n0.3,7\n")
        ad = path("ad.csv", "a,d\n3,1\n1,2\n")
        same = True
        for cmd, inp, extra in (("certify", cd, []), ("mse", ad, ["--gamma", "1.5"]), ("scan", cd, ["--grid", "5000"])):
            outs = []
            for run in (1, 2):
                out = path(f"{cmd}{run}.csv")
                _cli(cmd, inp, *extra, "--out", out)
                with open(out, "rb") as fh:
                    outs.append(fh.read())
            same &= outs[0] == outs[1] and len(outs[0]) > 0

        fail = path("fail.csv", "c,d\n50.959,0.7307\n3.085,0.0234\n0.0293,3.3652\n0.0284,2.921\n")
        q = path("q.csv", "N=2\n1,0\n0,0\n0,0\n2,0\n")
        m = path("m.csv", "N=2\n3,0\n1,0\n1,0\n4,0\n")
        codes = {
            "bad header": (_cli("certify", path("bad.csv", "x,y\n1,1\n")), 1),
            "negative coefficient": (_cli("minimize", path("neg.csv", "c,d\n1,-1\n")), 1),
            "bad flag": (_cli("scan", cd, "--grid", "3"), 1),
            "failed certificate": (_cli("certify", fail), 2),
            "misaligned matrices": (_cli("mse", q, "--m-matrix", m), 3),
            "passing certificate": (_cli("certify", cd), 0),
        }
    wrong = {k: v[0] for k, v in codes.items() if v[0] != v[1]}
    ok = same and not wrong
    return ok, f"byte-identical reruns: {same}; exit codes {'as documented' if not wrong else wrong}"


CHECKS = {n: globals()[f"check_{n}"] for n in NAMES}


@pytest.mark.parametrize("n", list(NAMES), ids=[f"criterion_{n}" for n in NAMES])
def test_criterion(n, capsys):
    ok, detail = CHECKS[n]()
    assert report(n, ok, detail, capsys), detail


if __name__ == "__main__":
    results = [report(n, *CHECKS[n]()) for n in NAMES]
    sys.exit(0 if all(results) else 1)
