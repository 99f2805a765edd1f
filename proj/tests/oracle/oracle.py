"""Reference values for the C++ tests, computed with numpy/scipy from the
defining formulas. Regenerate with: python3 tests/oracle/oracle.py"""

import json
import math
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import eigvalsh, svdvals


def weights(pi, pj, pk):
    # formula evaluated in the frame whose real axis points from i to j
    eij, eik = pj - pi, pk - pi
    u = eij / abs(eij)
    a, b = abs(eij), eik * np.conj(u)
    wa = 1.0 / a
    wb = -np.conj(b) / abs(b) ** 2
    return wa, wb, wa + wb


def constraint_matrix(p, m, designated):
    n = len(p)
    wf = np.zeros((n - m, n), dtype=complex)
    for i, (j, k) in designated.items():
        wa, wb, ws = weights(p[i], p[j], p[k])
        wf[i - m, i] += ws
        wf[i - m, j] -= wa
        wf[i - m, k] -= wb
    return wf[:, :m], wf[:, m:]


def cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


FIG3_P = np.array([1 + 3j, 3 + 1j, -2 + 2j, -4 + 1j, -4 + 0j, 2 - 2j])
FIG3_DES = {2: (0, 5), 3: (5, 4), 4: (2, 5), 5: (1, 2)}

SAMPLE_P = np.array([0, 3, 1 + 0.2j, 2.5 - 0.9j, 1.5 - 1j, 2 + 0.3j])


def fig3():
    wfl, wff = constraint_matrix(FIG3_P, 2, FIG3_DES)
    w = {}
    for i, (j, k) in FIG3_DES.items():
        wa, wb, ws = weights(FIG3_P[i], FIG3_P[j], FIG3_P[k])
        w[(i, i)], w[(i, j)], w[(i, k)] = ws, wa, wb
    det_formula = w[(3, 3)] * w[(4, 4)] * (w[(2, 2)] * w[(5, 5)] - w[(2, 5)] * w[(5, 2)])
    s = svdvals(wff)
    lff = wff.conj().T @ wff
    closed = -np.linalg.solve(wff, wfl @ FIG3_P[:2])
    return {
        "det": cplx(np.linalg.det(wff)),
        "det_formula": cplx(det_formula),
        "sigma_ratio": float(s[-1] / s[0]),
        "lambda_min_lff": float(eigvalsh(lff)[0]),
        "closed_form": [cplx(z) for z in closed],
        "w33": cplx(w[(2, 2)]), "w36": cplx(w[(2, 5)]), "w63": cplx(w[(5, 2)]),
    }


def static_localization():
    # estimator from zero estimates on the sample geometry, static truth
    wfl, wff = constraint_matrix(SAMPLE_P, 2, FIG3_DES)
    lff, lfl = wff.conj().T @ wff, wff.conj().T @ wfl
    pl = SAMPLE_P[:2]
    nf = 4

    def f(_, y):
        z = y[:nf] + 1j * y[nf:]
        d = -lff @ z - lfl @ pl
        return np.concatenate([d.real, d.imag])

    T = 20.0
    sol = solve_ivp(f, (0, T), np.zeros(2 * nf), method="DOP853", rtol=1e-13, atol=1e-14)
    z = sol.y[:nf, -1] + 1j * sol.y[nf:, -1]
    return {"horizon": T, "estimates": [cplx(v) for v in z],
            "lambda_min_lff": float(eigvalsh(lff)[0])}


def smoothstep(t, dur):
    if t >= dur:
        return 1.0, 0.0
    u = max(t, 0.0) / dur
    return u * u * (3 - 2 * u), (6 * u * (1 - u) / dur if t >= 0 else 0.0)


def path_center(t, speed=0.5, t_line=4.0, t_arc=2.0, rate=math.pi / 4):
    # line along +x, arc turning left, then straight
    if t <= t_line:
        return complex(speed * t, 0), complex(speed, 0)
    c = complex(speed * t_line, 0)
    tau = min(t - t_line, t_arc)
    c += (speed / rate) * (-1j) * (np.exp(1j * rate * tau) - 1)
    phi = rate * tau
    if t <= t_line + t_arc:
        return c, speed * np.exp(1j * phi)
    c += speed * (t - t_line - t_arc) * np.exp(1j * phi)
    return c, speed * np.exp(1j * phi)


def fig3_formation():
    p0 = FIG3_P - FIG3_P[0]
    target = 0.4 * np.exp(1j * math.radians(195)) * np.array(
        [0, 3, 1, 2.5 - 0.87j, 1.5 - 0.87j, 2])

    def desired(t):
        b, br = smoothstep(t, 2.0)
        c, cv = path_center(t)
        return c + p0 + b * (target - p0), cv + br * (target - p0)

    est_err = np.array([0.05, 0.05j, -0.05, -0.05j])
    n, m, nf = 6, 2, 4
    a = 1.0

    def f(t, y):
        z = y[: 10] + 1j * y[10:]
        p, ph = z[:n], z[n:]
        wfl, wff = constraint_matrix(p, m, FIG3_DES)
        lff, lfl = wff.conj().T @ wff, wff.conj().T @ wfl
        d, dr = desired(t)
        v = np.empty(n, dtype=complex)
        v[:m] = -a * (p[:m] - d[:m]) + dr[:m]
        v[m:] = -a * (ph - d[m:]) + dr[m:]
        dph = -2 * a * (ph - d[m:]) + dr[m:] - lff @ ph - lfl @ p[:m]
        dz = np.concatenate([v, dph])
        return np.concatenate([dz.real, dz.imag])

    z0 = np.concatenate([p0, p0[m:] + est_err])
    ts = [2.0, 5.0, 10.0]
    sol = solve_ivp(f, (0, 10), np.concatenate([z0.real, z0.imag]), method="DOP853",
                    rtol=1e-12, atol=1e-13, t_eval=ts, max_step=0.05)
    out = []
    for idx, t in enumerate(ts):
        z = sol.y[:10, idx] + 1j * sol.y[10:, idx]
        d, _ = desired(t)
        p, ph = z[:n], z[n:]
        out.append({"t": t,
                    "err_track_leaders": float(np.linalg.norm(p[:m] - d[:m])),
                    "err_track_followers": float(np.linalg.norm(p[m:] - d[m:])),
                    "err_est": float(np.linalg.norm(ph - p[m:])),
                    "positions": [cplx(v + FIG3_P[0]) for v in p]})
    # certificate from the initial state
    ep0 = float(np.linalg.norm(est_err))
    sep = min(min(abs(x - y) for ii, x in enumerate(desired(t)[0]) for y in desired(t)[0][ii + 1:])
              for t in np.arange(0, 10.0005, 0.001))
    return {"samples": out, "min_desired_separation": float(sep),
            "ep0_norm": ep0, "margin_global": float(sep - 2 * ep0)}


def main():
    collinear = weights(1.0 + 0j, 0j, 2.0 + 0j)
    data = {
        "collinear_example": {"w31": cplx(collinear[0]), "w32": cplx(collinear[1]),
                              "w33": cplx(collinear[2])},
        "fig3": fig3(),
        "static_localization": static_localization(),
        "fig3_formation": fig3_formation(),
    }
    out = Path(__file__).with_name("expected.json")
    out.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
