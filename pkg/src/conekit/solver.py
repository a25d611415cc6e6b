"""Dense LP/SDP solving via a homogeneous self-dual interior-point method.

One core handles every optimization problem in the package:

    minimize    c'x
    subject to  Ax = b,   x in K = R^f x R^l_+ x PSD(d_1) x ... x PSD(d_k)

with the free block eliminated in presolve (pivoted QR), the PSD blocks
in svec coordinates, Nesterov-Todd scaling, Mehrotra predictor-corrector
steps, and infeasibility certificates read off the homogeneous embedding
(tau/kappa).  Everything is dense and desk-scale: ambient dimensions in
the tens, constraint counts in the tens, which is exactly the regime the
package's face computations and recovery experiments live in.

A practical property this package leans on: the iterates converge to a
maximally complementary optimal pair (the analytic center of the optimal
face), so support sets / ranks of returned solutions identify minimal
faces, which the cones module exploits with margin checks plus per-index
fallback solves.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import NumericalFailure, UsageError
from .linalg import Subspace, smat, svec, svec_dim, svec_side

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 200
STEP_FRACTION = 0.99


class ConicProblem:
    """Standard-form conic problem.  Variable layout: ``num_free`` free
    coordinates, then ``num_nonneg`` nonnegative ones, then one svec
    block per entry of ``psd_sides``."""

    def __init__(self, A, b, c, num_free=0, num_nonneg=0, psd_sides=()):
        self.A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        self.b = np.asarray(b, dtype=np.float64).ravel()
        self.c = np.asarray(c, dtype=np.float64).ravel()
        self.num_free = int(num_free)
        self.num_nonneg = int(num_nonneg)
        self.psd_sides = tuple(int(d) for d in psd_sides)
        n = self.num_free + self.num_nonneg + sum(svec_dim(d) for d in self.psd_sides)
        if self.A.shape != (self.b.shape[0], n) or self.c.shape[0] != n:
            raise UsageError(
                f"inconsistent problem shapes: A {self.A.shape}, b {self.b.shape}, "
                f"c {self.c.shape}, n={n}"
            )


class SolveReport:
    __slots__ = ("status", "x", "y", "s", "kkt_residuals", "iterations",
                 "primal_obj", "dual_obj")

    def __init__(self, status, x=None, y=None, s=None, kkt_residuals=None,
                 iterations=0, primal_obj=np.nan, dual_obj=np.nan):
        self.status = status
        self.x = x
        self.y = y
        self.s = s
        self.kkt_residuals = kkt_residuals or (np.nan, np.nan, np.nan)
        self.iterations = iterations
        self.primal_obj = primal_obj
        self.dual_obj = dual_obj

    def __repr__(self):  # pragma: no cover
        return (f"SolveReport({self.status}, obj={self.primal_obj:.6g}, "
                f"iters={self.iterations})")


# ---------------------------------------------------------------------------
# cone block helpers

class _Blocks:
    """Index bookkeeping and per-block operations for R^l_+ x PSD blocks."""

    def __init__(self, num_nonneg, psd_sides):
        self.nl = num_nonneg
        self.sides = list(psd_sides)
        self.offsets = []
        off = num_nonneg
        for d in self.sides:
            self.offsets.append(off)
            off += svec_dim(d)
        self.n = off
        self.degree = num_nonneg + sum(self.sides)

    def identity(self):
        e = np.zeros(self.n)
        e[: self.nl] = 1.0
        for d, off in zip(self.sides, self.offsets):
            e[off: off + svec_dim(d)] = svec(np.eye(d))
        return e

    def mats(self, x):
        return [smat(x[off: off + svec_dim(d)])
                for d, off in zip(self.sides, self.offsets)]

    def min_eig(self, x):
        vals = []
        if self.nl:
            vals.append(float(np.min(x[: self.nl])))
        for m in self.mats(x):
            vals.append(float(np.linalg.eigvalsh(m)[0]))
        return min(vals) if vals else 0.0

    def step_to_boundary(self, x, dx, chols):
        """sup {a >= 0 : x + a dx in K}, given Cholesky factors of the
        PSD blocks of x."""
        alpha = np.inf
        if self.nl:
            neg = dx[: self.nl] < 0
            if np.any(neg):
                alpha = min(alpha, float(np.min(-x[: self.nl][neg] / dx[: self.nl][neg])))
        for (d, off), L in zip(zip(self.sides, self.offsets), chols):
            dm = smat(dx[off: off + svec_dim(d)])
            t = scipy.linalg.solve_triangular(L, dm, lower=True)
            t = scipy.linalg.solve_triangular(L, t.T, lower=True)
            lam_min = float(np.linalg.eigvalsh(0.5 * (t + t.T))[0])
            if lam_min < 0:
                alpha = min(alpha, -1.0 / lam_min)
        return alpha

    def chols(self, x, jitter=0.0):
        out = []
        for d, off in zip(self.sides, self.offsets):
            m = smat(x[off: off + svec_dim(d)])
            if jitter:
                m = m + jitter * np.eye(d)
            try:
                out.append(np.linalg.cholesky(m))
            except np.linalg.LinAlgError:
                w, v = np.linalg.eigh(m)
                w = np.maximum(w, 1e-14 * max(1.0, float(w[-1])))
                out.append(np.linalg.cholesky((v * w) @ v.T))
        return out


class _Scaling:
    """Nesterov-Todd scaling point for the current (x, s)."""

    def __init__(self, blocks: _Blocks, x, s):
        self.blocks = blocks
        nl = blocks.nl
        if nl:
            self.w_lp = np.sqrt(x[:nl] / s[:nl])
            self.lam_lp = np.sqrt(x[:nl] * s[:nl])
        else:
            self.w_lp = np.zeros(0)
            self.lam_lp = np.zeros(0)
        self.R = []
        self.Rinv = []
        self.lam_psd = []
        xch = blocks.chols(x)
        sch = blocks.chols(s)
        for Lx, Ls in zip(xch, sch):
            m = Ls.T @ Lx
            u, sig, vt = np.linalg.svd(m)
            sig = np.maximum(sig, 1e-300)
            r = Lx @ vt.T / np.sqrt(sig)
            rinv = (np.sqrt(sig)[:, None] * vt) @ np.linalg.inv(Lx)
            self.R.append(r)
            self.Rinv.append(rinv)
            self.lam_psd.append(sig)

    def scale_x(self, dx):
        """x-like vector to scaled space: R^{-1} mat(dx) R^{-T}."""
        out = np.empty_like(dx)
        b = self.blocks
        out[: b.nl] = dx[: b.nl] / self.w_lp
        for (d, off), rinv in zip(zip(b.sides, b.offsets), self.Rinv):
            m = smat(dx[off: off + svec_dim(d)])
            t = rinv @ m @ rinv.T
            out[off: off + svec_dim(d)] = svec(0.5 * (t + t.T))
        return out

    def scale_s(self, ds):
        """s-like vector to scaled space: R^T mat(ds) R."""
        out = np.empty_like(ds)
        b = self.blocks
        out[: b.nl] = ds[: b.nl] * self.w_lp
        for (d, off), r in zip(zip(b.sides, b.offsets), self.R):
            m = smat(ds[off: off + svec_dim(d)])
            t = r.T @ m @ r
            out[off: off + svec_dim(d)] = svec(0.5 * (t + t.T))
        return out

    def unscale_x(self, v):
        """Inverse of scale_x: dx = R mat(v) R^T."""
        out = np.empty_like(v)
        b = self.blocks
        out[: b.nl] = v[: b.nl] * self.w_lp
        for (d, off), r in zip(zip(b.sides, b.offsets), self.R):
            m = smat(v[off: off + svec_dim(d)])
            t = r @ m @ r.T
            out[off: off + svec_dim(d)] = svec(0.5 * (t + t.T))
        return out

    def apply_H(self, v):
        """W mat(v) W with W = R R^T (the primal-dual scaling operator)."""
        out = np.empty_like(v)
        b = self.blocks
        out[: b.nl] = v[: b.nl] * self.w_lp ** 2
        for (d, off), r in zip(zip(b.sides, b.offsets), self.R):
            m = smat(v[off: off + svec_dim(d)])
            w = r @ r.T
            t = w @ m @ w
            out[off: off + svec_dim(d)] = svec(0.5 * (t + t.T))
        return out

    def lambda_vec(self):
        b = self.blocks
        out = np.empty(b.n)
        out[: b.nl] = self.lam_lp
        for (d, off), sig in zip(zip(b.sides, b.offsets), self.lam_psd):
            out[off: off + svec_dim(d)] = svec(np.diag(sig))
        return out

    def lam_product(self, u, v):
        """Symmetrized product (u o v) in scaled coordinates."""
        b = self.blocks
        out = np.empty(b.n)
        out[: b.nl] = u[: b.nl] * v[: b.nl]
        for d, off in zip(b.sides, b.offsets):
            mu = smat(u[off: off + svec_dim(d)])
            mv = smat(v[off: off + svec_dim(d)])
            t = 0.5 * (mu @ mv + mv @ mu)
            out[off: off + svec_dim(d)] = svec(0.5 * (t + t.T))
        return out

    def lam_solve(self, rhs):
        """Solve (lambda o z) = rhs for z, lambda diagonal per block."""
        b = self.blocks
        out = np.empty(b.n)
        out[: b.nl] = rhs[: b.nl] / self.lam_lp
        for (d, off), sig in zip(zip(b.sides, b.offsets), self.lam_psd):
            m = smat(rhs[off: off + svec_dim(d)])
            denom = 0.5 * (sig[:, None] + sig[None, :])
            out[off: off + svec_dim(d)] = svec(m / denom)
        return out


# ---------------------------------------------------------------------------
# core HSD iteration

def _solve_normal(M, rhs, reg_scale):
    for reg in (0.0, 1e-12, 1e-10, 1e-8):
        try:
            cf = scipy.linalg.cho_factor(M + reg * reg_scale * np.eye(M.shape[0]),
                                         lower=True)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            continue
        sol = scipy.linalg.cho_solve(cf, rhs)
        # Iterative refinement against the unregularized matrix claws back
        # the digits lost to ill-conditioning near the central-path boundary.
        for _ in range(2):
            resid = rhs - M @ sol
            sol = sol + scipy.linalg.cho_solve(cf, resid)
        return sol
    return np.linalg.lstsq(M, rhs, rcond=None)[0]


def _core_hsd(A, b, c, blocks: _Blocks, tol, max_iter):
    """HSD Mehrotra predictor-corrector on min c'x, Ax=b, x in K."""
    m, n = A.shape
    nrm_b = 1.0 + np.linalg.norm(b)
    nrm_c = 1.0 + np.linalg.norm(c)
    nrm_A = max(1.0, float(np.linalg.norm(A, "fro")))

    x = blocks.identity()
    s = blocks.identity()
    y = np.zeros(m)
    tau, kappa = 1.0, 1.0
    nu = blocks.degree + 1

    status = "numerical-failure"
    it = 0
    best = None  # (worst residual, iterate snapshot) for reduced-accuracy exit
    for it in range(1, max_iter + 1):
        rp = A @ x - b * tau
        rd = -(A.T @ y) - s + c * tau
        rg = c @ x - b @ y + kappa
        mu = (x @ s + tau * kappa) / nu

        xt = x / tau
        st = s / tau
        yt = y / tau
        pres = np.linalg.norm(A @ xt - b) / nrm_b
        dres = np.linalg.norm(A.T @ yt + st - c) / nrm_c
        pobj = c @ xt
        dobj = b @ yt
        gap = abs(pobj - dobj) / (1.0 + max(abs(pobj), abs(dobj)))
        compl = (xt @ st) / (1.0 + max(abs(pobj), abs(dobj)))

        if pres <= tol and dres <= tol and min(gap, compl) <= tol:
            status = "optimal"
            break
        worst = max(pres, dres, min(gap, compl))
        if best is None or worst < best[0]:
            best = (worst, (xt.copy(), yt.copy(), st.copy(),
                            (pres, dres, gap), pobj, dobj))

        # Certificates from the homogeneous embedding.
        by = b @ y
        cx = c @ x
        if by > 0:
            if np.linalg.norm(A.T @ y + s) * nrm_b / by <= tol * nrm_A:
                return ("infeasible", x, y / by, s, (pres, dres, gap), it,
                        np.nan, np.nan)
        if cx < 0:
            if np.linalg.norm(A @ x) * nrm_c / (-cx) <= tol * nrm_A:
                return ("unbounded", x / (-cx), y, s, (pres, dres, gap), it,
                        np.nan, np.nan)
        if tau <= 1e-10 * max(1.0, kappa) and mu <= 1e-10:
            # converged to a ray without a clean certificate; the post-loop
            # fallback may still salvage a near-optimal earlier iterate
            break

        try:
            sc = _Scaling(blocks, x, s)
        except (np.linalg.LinAlgError, ValueError):
            break
        lam = sc.lambda_vec()

        if blocks.sides:
            H_AT = np.column_stack([sc.apply_H(A[i]) for i in range(m)])
        else:
            H_AT = A.T * (sc.w_lp ** 2)[:, None]
        M = A @ H_AT
        reg_scale = max(np.trace(M) / max(m, 1), 1.0)
        Hc = sc.apply_H(c)
        v2 = _solve_normal(M, b + A @ Hc, reg_scale)
        dx2_base = sc.apply_H(A.T @ v2 - c)

        x_chols = blocks.chols(x)
        s_chols = blocks.chols(s)

        def _g_dual(scl, u):
            # R^{-T} mat(u) R^{-1}: the s-space image of the scaled vector u
            out = np.empty_like(u)
            bl = scl.blocks
            out[: bl.nl] = u[: bl.nl] / scl.w_lp
            for (d, off), rinv in zip(zip(bl.sides, bl.offsets), scl.Rinv):
                mm = smat(u[off: off + svec_dim(d)])
                t = rinv.T @ mm @ rinv
                out[off: off + svec_dim(d)] = svec(0.5 * (t + t.T))
            return out

        def direction_raw(rp_t, rd_t, rg_t, rhs_c, rhs_tk):
            # Solve the linearized HSD system with residual targets:
            #   A dx - b dtau            = rp_t
            #   -A'dy - ds + c dtau      = rd_t
            #   c dx - b'dy + dkappa     = rg_t
            #   lam o (dx~ + ds~)        = rhs_c
            #   tau dkappa + kappa dtau  = rhs_tk
            u = sc.lam_solve(rhs_c)
            gu = _g_dual(sc, u)
            h1 = rp_t - A @ sc.apply_H(rd_t + gu)
            v1 = _solve_normal(M, h1, reg_scale)
            dx1 = sc.apply_H(A.T @ v1 + rd_t + gu)
            denom = c @ dx2_base - b @ v2 - kappa / tau
            num = rg_t - c @ dx1 + b @ v1 - rhs_tk / tau
            dtau = num / denom if abs(denom) > 1e-300 else 0.0
            dy = v1 + dtau * v2
            dx = dx1 + dtau * dx2_base
            dkappa = (rhs_tk - kappa * dtau) / tau
            ds = -(A.T @ dy) + c * dtau - rd_t
            return dx, dy, ds, dtau, dkappa

        def direction(rhs_c, rhs_tk):
            # Raw solve plus KKT-level iterative refinement: near the
            # boundary the scaling operator H amplifies roundoff enough to
            # stall primal feasibility, and re-solving against the true
            # residuals (with the factorization reused) restores it.
            tgt = (-rp, -rd, -rg, rhs_c, rhs_tk)
            dx, dy, ds, dt_, dk_ = direction_raw(*tgt)
            best = None
            for _ in range(3):
                r1 = tgt[0] - (A @ dx - b * dt_)
                r2 = tgt[1] - (-(A.T @ dy) - ds + c * dt_)
                r3 = tgt[2] - (c @ dx - b @ dy + dk_)
                rc = tgt[3] - sc.lam_product(lam, sc.scale_x(dx) + sc.scale_s(ds))
                rtk = tgt[4] - (tau * dk_ + kappa * dt_)
                err = (np.linalg.norm(r1) / nrm_b + np.linalg.norm(r2) / nrm_c
                       + abs(r3) + abs(rtk)
                       + np.linalg.norm(rc) / (1.0 + np.linalg.norm(tgt[3])))
                if best is not None and err >= best[0]:
                    dx, dy, ds, dt_, dk_ = best[1]
                    break
                best = (err, (dx, dy, ds, dt_, dk_))
                if err <= 1e-12:
                    break
                cx_, cy_, cs_, ct_, ck_ = direction_raw(r1, r2, r3, rc, rtk)
                dx = dx + cx_
                dy = dy + cy_
                ds = ds + cs_
                dt_ = dt_ + ct_
                dk_ = dk_ + ck_
            return dx, dy, ds, dt_, dk_

        # predictor
        rhs_c = -sc.lam_product(lam, lam)
        rhs_tk = -tau * kappa
        dxa, dya, dsa, dta, dka = direction(rhs_c, rhs_tk)

        ax = blocks.step_to_boundary(x, dxa, x_chols)
        as_ = blocks.step_to_boundary(s, dsa, s_chols)
        at = -tau / dta if dta < 0 else np.inf
        ak = -kappa / dka if dka < 0 else np.inf
        alpha_aff = min(1.0, ax, as_, at, ak)

        mu_aff = ((x + alpha_aff * dxa) @ (s + alpha_aff * dsa)
                  + (tau + alpha_aff * dta) * (kappa + alpha_aff * dka)) / nu
        sigma = min(1.0, max(0.0, (mu_aff / mu))) ** 3

        # corrector (combined)
        dxs = sc.lam_product(sc.scale_x(dxa), sc.scale_s(dsa))
        rhs_c = -sc.lam_product(lam, lam) + sigma * mu * blocks.identity() - dxs
        rhs_tk = -tau * kappa + sigma * mu - dta * dka
        dx, dy, ds, dt, dk = direction(rhs_c, rhs_tk)

        ax = blocks.step_to_boundary(x, dx, x_chols)
        as_ = blocks.step_to_boundary(s, ds, s_chols)
        at = -tau / dt if dt < 0 else np.inf
        ak = -kappa / dk if dk < 0 else np.inf
        alpha = STEP_FRACTION * min(ax, as_, at, ak)
        alpha = min(1.0, alpha)
        if not np.isfinite(alpha) or alpha <= 1e-13:
            break

        x = x + alpha * dx
        y = y + alpha * dy
        s = s + alpha * ds
        tau += alpha * dt
        kappa += alpha * dk

    if status != "optimal":
        xt = x / tau if tau > 0 else x
        st = s / tau if tau > 0 else s
        yt = y / tau if tau > 0 else y
        pres = np.linalg.norm(A @ xt - b) / nrm_b
        dres = np.linalg.norm(A.T @ yt + st - c) / nrm_c
        pobj, dobj = c @ xt, b @ yt
        gap = abs(pobj - dobj) / (1.0 + max(abs(pobj), abs(dobj)))
        compl = (xt @ st) / (1.0 + max(abs(pobj), abs(dobj)))
        worst = max(pres, dres, min(gap, compl))
        if best is None or worst < best[0]:
            best = (worst, (xt, yt, st, (pres, dres, gap), pobj, dobj))
        # Degenerate instances can floor a residual slightly above tol; the
        # best iterate within 10x tol is still a perfectly good optimum.
        if best[0] <= 10.0 * tol:
            xb, yb, sb, res, pobj, dobj = best[1]
            return ("optimal", xb, yb, sb, res, it, pobj, dobj)
        return ("numerical-failure", xt, yt, st, (pres, dres, gap), it, pobj, dobj)

    return ("optimal", x / tau, y / tau, s / tau,
            (pres, dres, gap), it, pobj, dobj)


# ---------------------------------------------------------------------------
# presolve: free-variable elimination and row reduction

def solve_conic(prob: ConicProblem, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> SolveReport:
    A, b, c = prob.A, prob.b, prob.c
    nf = prob.num_free
    blocks = _Blocks(prob.num_nonneg, prob.psd_sides)
    m = A.shape[0]

    # --- eliminate free variables
    if nf:
        F = A[:, :nf]
        G = A[:, nf:]
        cf, cg = c[:nf], c[nf:]
        q, r, piv = scipy.linalg.qr(F, pivoting=True)
        diag = np.abs(np.diag(r)) if min(F.shape) else np.array([])
        rank = int(np.sum(diag > 1e-12 * (diag[0] if diag.size else 1.0)))
        # objective must not depend on the unconstrained part of the free block
        if rank < nf:
            _, sv, vt = np.linalg.svd(F)
            nullity = nf - int(np.sum(sv > 1e-12 * (sv[0] if sv.size else 1.0)))
            if nullity and np.linalg.norm(vt[nf - nullity:] @ cf) > 1e-9 * (1 + np.linalg.norm(c)):
                # objective unbounded along null(F) if feasible at all
                feas = solve_conic(
                    ConicProblem(A, b, np.zeros_like(c), nf, prob.num_nonneg,
                                 prob.psd_sides), tol, max_iter)
                st = "infeasible" if feas.status == "infeasible" else "unbounded"
                return SolveReport(st)
        q1, q2 = q[:, :rank], q[:, rank:]
        A_red = q2.T @ G
        b_red = q2.T @ b
        # fold the free-variable substitution into the reduced objective
        # xf = F^+ (b - G xg);  c'x = cf'F^+ b + (cg - G'F^{+T} cf)' xg
        Fpinv_cf = np.linalg.lstsq(F.T, cf, rcond=None)[0]  # F^{+T} cf
        c_red = cg - G.T @ Fpinv_cf
        obj_shift = float(Fpinv_cf @ b)
    else:
        A_red, b_red, c_red = A, b, c
        obj_shift = 0.0

    # --- consistency and row reduction
    keep = np.arange(A_red.shape[0])
    if A_red.shape[0]:
        x_ls, _, _, _ = np.linalg.lstsq(A_red, b_red, rcond=None)
        if np.linalg.norm(A_red @ x_ls - b_red) > 1e-8 * (1.0 + np.linalg.norm(b_red)):
            return SolveReport("infeasible")
        qr_t = scipy.linalg.qr(A_red.T, pivoting=True)
        diag = np.abs(np.diag(qr_t[1]))
        rank2 = int(np.sum(diag > 1e-11 * (diag[0] if diag.size else 1.0))) if diag.size else 0
        keep = np.sort(qr_t[2][:rank2])
        A_red = A_red[keep]
        b_red = b_red[keep]

    # --- core solve
    if A_red.shape[0] == 0:
        # no constraints: optimal iff c_red is in the dual cone, at xg = 0
        probe = _Blocks(prob.num_nonneg, prob.psd_sides)
        if probe.n == 0 or probe.min_eig(c_red) >= -tol:
            xg = np.zeros(probe.n)
            y_red = np.zeros(0)
            s_red = c_red.copy()
            core = ("optimal", xg, y_red, s_red, (0.0, 0.0, 0.0), 0, 0.0, 0.0)
        else:
            return SolveReport("unbounded")
    else:
        core = _core_hsd(A_red, b_red, c_red, blocks, tol, max_iter)

    status, xg, y_red, s_red, kkt, iters, pobj, dobj = core
    if status != "optimal":
        return SolveReport(status, iterations=iters, kkt_residuals=kkt)

    # --- undo presolve
    if nf:
        xf = np.linalg.lstsq(F, b - G @ xg, rcond=None)[0]
        x_full = np.concatenate([xf, xg])
        y_full = np.zeros(m)
        y_part = q2 @ _scatter(y_red, keep, q2.shape[1])
        # dual feasibility on the free block: F'y = cf
        rhs = cf - F.T @ y_part
        w = np.linalg.lstsq(F.T @ q1, rhs, rcond=None)[0]
        y_full = y_part + q1 @ w
        s_full = np.concatenate([np.zeros(nf), s_red])
    else:
        x_full = xg
        y_full = _scatter(y_red, keep, m)
        s_full = s_red

    pres = np.linalg.norm(A @ x_full - b) / (1.0 + np.linalg.norm(b))
    dual_res_vec = A.T @ y_full + np.concatenate([np.zeros(nf), s_red]) - c
    dres = np.linalg.norm(dual_res_vec) / (1.0 + np.linalg.norm(c))
    pobj_full = float(c @ x_full)
    dobj_full = float(b @ y_full)
    gap = abs(pobj_full - dobj_full) / (1.0 + max(abs(pobj_full), abs(dobj_full)))
    return SolveReport("optimal", x_full, y_full, s_full,
                       (float(pres), float(dres), float(gap)), iters,
                       pobj_full, dobj_full)


def _scatter(vals, idx, n):
    out = np.zeros(n)
    out[idx] = vals
    return out


# ---------------------------------------------------------------------------
# LP / SDP front ends

class LpProblem:
    """min c'x  s.t.  Ax = b,  x_i >= 0 for i with lower bound 0 and
    x_i free for i with lower bound -inf."""

    def __init__(self, c, A, b, lower_bounds=None):
        self.c = np.asarray(c, dtype=np.float64).ravel()
        self.A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        self.b = np.asarray(b, dtype=np.float64).ravel()
        n = self.c.shape[0]
        if self.A.shape[1] != n or self.A.shape[0] != self.b.shape[0]:
            raise UsageError("LP dimensions disagree")
        if lower_bounds is None:
            self.free_mask = np.zeros(n, dtype=bool)
        else:
            lb = np.asarray(lower_bounds, dtype=np.float64).ravel()
            if lb.shape[0] != n or not np.all((lb == 0) | np.isneginf(lb)):
                raise UsageError("lower bounds must be 0 or -inf per coordinate")
            self.free_mask = np.isneginf(lb)


def solve_lp(p: LpProblem, tol: float = DEFAULT_TOL,
             max_iter: int = DEFAULT_MAX_ITER) -> SolveReport:
    free_idx = np.where(p.free_mask)[0]
    pos_idx = np.where(~p.free_mask)[0]
    perm = np.concatenate([free_idx, pos_idx]).astype(int)
    prob = ConicProblem(p.A[:, perm], p.b, p.c[perm],
                        num_free=len(free_idx), num_nonneg=len(pos_idx))
    rep = solve_conic(prob, tol, max_iter)
    if rep.x is not None and rep.x.shape[0] == len(perm):
        inv = np.argsort(perm)
        rep.x = rep.x[inv]
        if rep.s is not None and rep.s.shape[0] == len(perm):
            rep.s = rep.s[inv]
    return rep


class SdpProblem:
    """min <C, X>  s.t.  <A_i, X> = b_i,  X psd of side d.

    C and the A_i may be given as symmetric matrices or svec vectors.
    """

    def __init__(self, C, constraints, d=None):
        def to_svec(v):
            v = np.asarray(v, dtype=np.float64)
            return svec(v) if v.ndim == 2 else v.ravel()

        self.C = to_svec(C)
        self.rows = [to_svec(a) for a, _ in constraints]
        self.b = np.array([float(bb) for _, bb in constraints])
        self.d = int(d) if d is not None else svec_side(self.C.shape[0])
        want = svec_dim(self.d)
        if self.C.shape[0] != want or any(r.shape[0] != want for r in self.rows):
            raise UsageError("SDP constraint dimensions disagree")


def solve_sdp(p: SdpProblem, tol: float = DEFAULT_TOL,
              max_iter: int = DEFAULT_MAX_ITER) -> SolveReport:
    A = np.vstack(p.rows) if p.rows else np.zeros((0, svec_dim(p.d)))
    prob = ConicProblem(A, p.b, p.C, num_free=0, num_nonneg=0, psd_sides=(p.d,))
    return solve_conic(prob, tol, max_iter)


# ---------------------------------------------------------------------------
# relative-interior machinery (max-min-slack programs over a face slice)

def max_min_slack_orthant(W: Subspace, act, delta: float = 1e-6,
                          tol: float = DEFAULT_TOL):
    """max t  s.t.  w in W, w_j = 0 off ``act``, w_j >= t on ``act``.

    Returns (t_star, w) with w the optimizing point (None if the solve
    failed).  The feasible region is compactified by t <= 1 and a slack
    budget, which does not change the sign of the optimum.
    """
    n = W.ambient_dim
    act = np.asarray(sorted(act), dtype=int)
    off = np.setdiff1d(np.arange(n), act)
    M = W.basis
    k = W.dim
    na = len(act)
    # vars: u (free k), t (free 1), zeta (na), r0 (1), rho (1)
    nl = na + 2
    rows = []
    rhs = []
    for j in off:
        rows.append(np.concatenate([M[j], [0.0], np.zeros(nl)]))
        rhs.append(0.0)
    for i, j in enumerate(act):
        row = np.concatenate([M[j], [-1.0], np.zeros(nl)])
        row[k + 1 + i] = -1.0
        rows.append(row)
        rhs.append(0.0)
    row = np.zeros(k + 1 + nl)
    row[k] = 1.0
    row[k + 1 + na] = 1.0
    rows.append(row)
    rhs.append(1.0)
    row = np.zeros(k + 1 + nl)
    row[k + 1: k + 1 + na] = 1.0
    row[k + 1 + na + 1] = 1.0
    rows.append(row)
    rhs.append(4.0 * max(1, na))
    c = np.zeros(k + 1 + nl)
    c[k] = -1.0
    prob = ConicProblem(np.vstack(rows), np.array(rhs), c,
                        num_free=k + 1, num_nonneg=nl)
    rep = solve_conic(prob, tol=tol)
    if rep.status != "optimal":
        raise NumericalFailure(f"relative-interior solve ended with {rep.status}")
    u = rep.x[:k]
    t = float(rep.x[k])
    return t, M @ u


def max_min_slack_psd(W: Subspace, U: np.ndarray, d: int,
                      delta: float = 1e-6, tol: float = DEFAULT_TOL):
    """max t  s.t.  w in W, mat(w) = U Y U', Y >= t I  (Y of side r).

    W lives in svec coordinates of side-d symmetric matrices; U has
    orthonormal columns.  Returns (t_star, w, Y).
    """
    n = svec_dim(d)
    if W.ambient_dim != n:
        raise UsageError("W is not in svec coordinates of side d")
    U = np.atleast_2d(np.asarray(U, dtype=np.float64))
    r = U.shape[1]
    M = W.basis
    k = W.dim
    # complement conditions: components of mat(w) outside the U-block vanish
    comp = scipy.linalg.null_space(U.T) if r < d else np.zeros((d, 0))
    conds = []
    for i in range(comp.shape[1]):
        for j in range(i, comp.shape[1]):
            e = 0.5 * (np.outer(comp[:, i], comp[:, j]) + np.outer(comp[:, j], comp[:, i]))
            conds.append(svec(e))
        for j in range(r):
            e = 0.5 * (np.outer(comp[:, i], U[:, j]) + np.outer(U[:, j], comp[:, i]))
            conds.append(svec(e))
    nr = svec_dim(r)
    # vars: u (free k), t (free 1), S (psd side r), r0 (nonneg), rho (nonneg)
    ncols = k + 1 + 2 + nr
    rows = []
    rhs = []
    for cond in conds:
        row = np.zeros(ncols)
        row[:k] = cond @ M
        rows.append(row)
        rhs.append(0.0)
    # U' mat(w) U - t I - S = 0   (svec_r components; S sits after the lp block)
    P = np.empty((nr, k))
    for j in range(k):
        P[:, j] = svec(U.T @ smat(M[:, j]) @ U)
    ivec = svec(np.eye(r))
    for i in range(nr):
        row = np.zeros(ncols)
        row[:k] = P[i]
        row[k] = -ivec[i]
        row[k + 3 + i] = -1.0
        rows.append(row)
        rhs.append(0.0)
    row = np.zeros(ncols)
    row[k] = 1.0
    row[k + 1] = 1.0
    rows.append(row)
    rhs.append(1.0)
    row = np.zeros(ncols)
    row[k + 2] = 1.0
    row[k + 3:] = ivec
    rows.append(row)
    rhs.append(4.0 * max(1, r))
    c = np.zeros(ncols)
    c[k] = -1.0
    prob = ConicProblem(np.vstack(rows), np.array(rhs), c,
                        num_free=k + 1, num_nonneg=2, psd_sides=(r,))
    rep = solve_conic(prob, tol=tol)
    if rep.status != "optimal":
        raise NumericalFailure(f"relative-interior solve ended with {rep.status}")
    u = rep.x[:k]
    w = M @ u
    Y = U.T @ smat(w) @ U
    return float(rep.x[k]), w, 0.5 * (Y + Y.T)


def relative_interior_point(W: Subspace, face, delta: float = 1e-6):
    """A point of W in the relative interior of a normal-cone-shaped set.

    ``face`` is ("orthant", d, support_indices) for N = {w : w <= 0 on
    the support, w = 0 elsewhere}, or ("psd", d, Z) for N = -Z S+ Z'
    (svec coordinates).  Returns the point, or None when the slice
    misses the relative interior.  The returned point's own slack (not
    the solver's objective value) decides feasibility.
    """
    kind = face[0]
    if kind == "orthant":
        _, d, support = face
        if len(support) == 0:
            return np.zeros(d) if W.ambient_dim == d else None
        act = np.asarray(sorted(support), dtype=int)
        t, w = max_min_slack_orthant(W, support)
        slack = float(np.min(w[act]))
        if t > delta and slack > delta:
            return -w
        return None
    if kind == "psd":
        _, d, Z = face
        Z = np.atleast_2d(np.asarray(Z, dtype=np.float64))
        if Z.shape[1] == 0:
            return np.zeros(svec_dim(d)) if W.ambient_dim == svec_dim(d) else None
        t, w, Y = max_min_slack_psd(W, Z, d)
        lam_min = float(np.linalg.eigvalsh(Y)[0])
        if t > delta and lam_min > delta:
            return -w
        return None
    raise UsageError(f"unknown face kind {kind!r}")
