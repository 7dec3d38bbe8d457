"""Fused scalar derivative loops for each controller family.

The closed-loop states are small (a dozen floats for the scenarios this
library targets), so the integrator works on plain Python lists with all
realization constants hoisted into tuples. Each builder returns the
derivative map, an output map for logging, and the state layout. The
equations duplicate the readable blocks in ``controllers``; a test asserts
the two implementations agree to machine precision.

Observer-canonical blocks are evaluated structurally: state i feeds state
i+1, the last column carries the negated denominator coefficients, and the
block output is the last state.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

__all__ = ["LoopSpec", "build_loop"]


@dataclass
class LoopSpec:
    x0: list
    rhs: object            # rhs(t, X, dX) -> None
    outputs: object        # outputs(t, X) -> tuple aligned with out_names
    out_names: tuple
    state_names: list
    theta_start: int
    theta_count: int


def _obs_cols(tf):
    """(last-column, input-vector) tuples of the observer-canonical block."""
    n = tf.den.degree
    col = tuple(-float(tf.den.coef[n - i]) for i in range(n))
    padded = [0.0] * n
    nc = tf.num.coef
    for idx in range(nc.size):
        padded[n - nc.size + idx] = float(nc[idx])
    b = tuple(float(tf.gain) * v for v in reversed(padded))
    return col, b


def _lam_row(lam):
    q = lam.degree
    return tuple(-float(lam.coef[q - j]) for j in range(q))


def _names(prefix, count):
    return [f"{prefix}[{i}]" for i in range(count)]


def build_loop(cfg) -> LoopSpec:
    builders = {
        "orm_n1": _build_n1,
        "crm_n1": _build_n1,
        "crm_n2": _build_n2,
        "crm_high_known": _build_high_known,
        "crm_high_unknown": _build_high_unknown,
    }
    return builders[cfg.family](cfg)


# ---------------------------------------------------------------------------
# relative degree 1 (open- or closed-loop reference model)
# ---------------------------------------------------------------------------

def _build_n1(cfg) -> LoopSpec:
    n, m, nl = cfg.n, cfg.m, cfg.n - 1
    ip, im = 0, n
    io1 = im + m
    io2 = io1 + nl
    ith = io2 + nl
    ntheta = 2 * n
    N = ith + ntheta

    pcol, bp = _obs_cols(cfg.plant_tf)
    mcol, bm = _obs_cols(cfg.ref_prime_tf)
    km = cfg.km
    ell = tuple(float(v) for v in cfg.ell)
    lamrow = _lam_row(cfg.lam)
    g = cfg.gamma * cfg.sign_kp
    rfun = cfg.rfun
    iy, iym = ip + n - 1, im + m - 1
    widx = tuple(range(io1, io1 + nl)) + (iy,) + tuple(range(io2, io2 + nl))

    def rhs(t, X, dX):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        u = X[ith] * r
        k = ith + 1
        for j in widx:
            u += X[k] * X[j]
            k += 1
        prev = 0.0
        for i in range(n):
            dX[ip + i] = prev + pcol[i] * y + bp[i] * u
            prev = X[ip + i]
        ym = X[iym]
        kmr = km * r
        prev = 0.0
        for i in range(m):
            dX[im + i] = prev + mcol[i] * ym + bm[i] * kmr - ell[i] * ey
            prev = X[im + i]
        for i in range(nl - 1):
            dX[io1 + i] = X[io1 + i + 1]
            dX[io2 + i] = X[io2 + i + 1]
        if nl:
            acc1 = u
            acc2 = y
            for j in range(nl):
                acc1 += lamrow[j] * X[io1 + j]
                acc2 += lamrow[j] * X[io2 + j]
            dX[io1 + nl - 1] = acc1
            dX[io2 + nl - 1] = acc2
        gey = -g * ey
        dX[ith] = gey * r
        k = ith + 1
        for j in widx:
            dX[k] = gey * X[j]
            k += 1

    def outputs(t, X):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        u = X[ith] * r
        tn = X[ith] * X[ith]
        k = ith + 1
        for j in widx:
            u += X[k] * X[j]
            tn += X[k] * X[k]
            k += 1
        return (r, y, X[iym], ey, u, sqrt(tn))

    x0 = [0.0] * N
    x0[ip:ip + n] = cfg.x_p0
    x0[im:im + m] = cfg.x_m0
    x0[ith:ith + ntheta] = cfg.theta0
    names = (_names("x_p", n) + _names("x_m", m) + _names("omega1", nl)
             + _names("omega2", nl) + _names("theta", ntheta))
    return LoopSpec(x0, rhs, outputs, ("r", "y", "ym", "ey", "u", "theta_norm"),
                    names, ith, ntheta)


# ---------------------------------------------------------------------------
# relative degree 2
# ---------------------------------------------------------------------------

def _build_n2(cfg) -> LoopSpec:
    n, m, nl = cfg.n, cfg.m, cfg.n - 1
    ip, im = 0, n
    io1 = im + m
    io2 = io1 + nl
    ith = io2 + nl
    ntheta = 2 * n
    iz = ith + ntheta
    N = iz + ntheta

    pcol, bp = _obs_cols(cfg.plant_tf)
    mcol, bm = _obs_cols(cfg.ref_prime_tf)
    km = cfg.km
    ell = tuple(float(v) for v in cfg.ell)
    lamrow = _lam_row(cfg.lam)
    g = cfg.gamma * cfg.sign_kp
    a = cfg.a_filter
    rfun = cfg.rfun
    iy, iym = ip + n - 1, im + m - 1
    widx = tuple(range(io1, io1 + nl)) + (iy,) + tuple(range(io2, io2 + nl))

    def rhs(t, X, dX):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        gey = -g * ey
        zz = 0.0
        thw = X[ith] * r
        k = ith + 1
        for j in widx:
            thw += X[k] * X[j]
            k += 1
        for j in range(ntheta):
            zj = X[iz + j]
            zz += zj * zj
            dX[ith + j] = gey * zj
        u = gey * zz + thw
        prev = 0.0
        for i in range(n):
            dX[ip + i] = prev + pcol[i] * y + bp[i] * u
            prev = X[ip + i]
        ym = X[iym]
        kmr = km * r
        prev = 0.0
        for i in range(m):
            dX[im + i] = prev + mcol[i] * ym + bm[i] * kmr - ell[i] * ey
            prev = X[im + i]
        for i in range(nl - 1):
            dX[io1 + i] = X[io1 + i + 1]
            dX[io2 + i] = X[io2 + i + 1]
        if nl:
            acc1 = u
            acc2 = y
            for j in range(nl):
                acc1 += lamrow[j] * X[io1 + j]
                acc2 += lamrow[j] * X[io2 + j]
            dX[io1 + nl - 1] = acc1
            dX[io2 + nl - 1] = acc2
        dX[iz] = -a * X[iz] + r
        for jj, j in enumerate(widx):
            dX[iz + 1 + jj] = -a * X[iz + 1 + jj] + X[j]

    def outputs(t, X):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        gey = -g * ey
        zz = 0.0
        thw = X[ith] * r
        tn = X[ith] * X[ith]
        k = ith + 1
        for j in widx:
            thw += X[k] * X[j]
            tn += X[k] * X[k]
            k += 1
        for j in range(ntheta):
            zj = X[iz + j]
            zz += zj * zj
        u = gey * zz + thw
        return (r, y, X[iym], ey, u, sqrt(tn))

    x0 = [0.0] * N
    x0[ip:ip + n] = cfg.x_p0
    x0[im:im + m] = cfg.x_m0
    x0[ith:ith + ntheta] = cfg.theta0
    names = (_names("x_p", n) + _names("x_m", m) + _names("omega1", nl)
             + _names("omega2", nl) + _names("theta", ntheta)
             + _names("zeta", ntheta))
    return LoopSpec(x0, rhs, outputs, ("r", "y", "ym", "ey", "u", "theta_norm"),
                    names, ith, ntheta)


# ---------------------------------------------------------------------------
# augmented error, high-frequency gain known (normalized to one)
# ---------------------------------------------------------------------------

def _build_high_known(cfg) -> LoopSpec:
    n, m, nl = cfg.n, cfg.m, cfg.n - 1
    q = len(cfg.f_cols[0])
    nw = 2 * n - 1
    ip, im = 0, n
    io1 = im + m
    io2 = io1 + nl
    ith = io2 + nl
    izf = ith + nw
    ix = izf + nw * q
    iaf = ix + q
    recon = cfg.theta_star_bar is not None
    irc = iaf + m
    N = irc + (m if recon else 0)

    pcol, bp = _obs_cols(cfg.plant_tf)
    mcol, bm = _obs_cols(cfg.ref_prime_tf)
    km = cfg.km
    ell = tuple(float(v) for v in cfg.ell)
    lamrow = _lam_row(cfg.lam)
    fcol = cfg.f_cols[0]
    wfcol, bwf = cfg.wf_cols
    gamma = cfg.gamma
    rfun = cfg.rfun
    iy, iym = ip + n - 1, im + m - 1
    widx = tuple(range(io1, io1 + nl)) + (iy,) + tuple(range(io2, io2 + nl))
    zidx = tuple(izf + j * q + q - 1 for j in range(nw))
    tstar = cfg.theta_star_bar

    def rhs(t, X, dX):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        thw = 0.0
        thz = 0.0
        zz = 0.0
        for j in range(nw):
            thj = X[ith + j]
            thw += thj * X[widx[j]]
            zj = X[zidx[j]]
            thz += thj * zj
            zz += zj * zj
        u = r + thw
        echi = thz - X[ix + q - 1]
        ea = ey + X[iaf + m - 1]
        gea = -gamma * ea
        prev = 0.0
        for i in range(n):
            dX[ip + i] = prev + pcol[i] * y + bp[i] * u
            prev = X[ip + i]
        ym = X[iym]
        kmr = km * r
        prev = 0.0
        for i in range(m):
            dX[im + i] = prev + mcol[i] * ym + bm[i] * kmr - ell[i] * ey
            prev = X[im + i]
        for i in range(nl - 1):
            dX[io1 + i] = X[io1 + i + 1]
            dX[io2 + i] = X[io2 + i + 1]
        if nl:
            acc1 = u
            acc2 = y
            for j in range(nl):
                acc1 += lamrow[j] * X[io1 + j]
                acc2 += lamrow[j] * X[io2 + j]
            dX[io1 + nl - 1] = acc1
            dX[io2 + nl - 1] = acc2
        for j in range(nw):
            dX[ith + j] = gea * X[zidx[j]]
            base = izf + j * q
            last = X[base + q - 1]
            w = X[widx[j]]
            prev = w
            for i in range(q):
                dX[base + i] = prev + fcol[i] * last
                prev = X[base + i]
        last = X[ix + q - 1]
        prev = thw
        for i in range(q):
            dX[ix + i] = prev + fcol[i] * last
            prev = X[ix + i]
        aug_in = echi - ea * zz
        last = X[iaf + m - 1]
        prev = 0.0
        for i in range(m):
            dX[iaf + i] = prev + wfcol[i] * last + bwf[i] * aug_in
            prev = X[iaf + i]
        if recon:
            phz = thz
            for j in range(nw):
                phz -= tstar[j] * X[zidx[j]]
            rec_in = phz - ea * zz
            last = X[irc + m - 1]
            prev = 0.0
            for i in range(m):
                dX[irc + i] = prev + wfcol[i] * last + bwf[i] * rec_in
                prev = X[irc + i]

    def outputs(t, X):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        thw = 0.0
        thz = 0.0
        zz = 0.0
        tn = 0.0
        wn = 0.0
        for j in range(nw):
            thj = X[ith + j]
            wj = X[widx[j]]
            thw += thj * wj
            tn += thj * thj
            wn += wj * wj
            zj = X[zidx[j]]
            thz += thj * zj
            zz += zj * zj
        u = r + thw
        echi = thz - X[ix + q - 1]
        ea = ey + X[iaf + m - 1]
        tdn = gamma * abs(ea) * sqrt(zz)
        out = (r, y, X[iym], ey, u, sqrt(tn), ea, echi, sqrt(wn), tdn)
        if recon:
            out = out + (X[irc + m - 1],)
        return out

    x0 = [0.0] * N
    x0[ip:ip + n] = cfg.x_p0
    x0[im:im + m] = cfg.x_m0
    x0[ith:ith + nw] = cfg.theta0
    names = (_names("x_p", n) + _names("x_m", m) + _names("omega1", nl)
             + _names("omega2", nl) + _names("theta", nw)
             + _names("zeta_filter", nw * q) + _names("chi_filter", q)
             + _names("aug_filter", m))
    out_names = ("r", "y", "ym", "ey", "u", "theta_norm", "ea", "echi",
                 "omegabar_norm", "thetadot_norm")
    if recon:
        names += _names("recon_filter", m)
        out_names = out_names + ("ea_recon",)
    return LoopSpec(x0, rhs, outputs, out_names, names, ith, nw)


# ---------------------------------------------------------------------------
# augmented error, high-frequency gain unknown (known sign)
# ---------------------------------------------------------------------------

def _build_high_unknown(cfg) -> LoopSpec:
    n, m, nl = cfg.n, cfg.m, cfg.n - 1
    q = len(cfg.f_cols[0])
    nth = 2 * n
    ip, im = 0, n
    io1 = im + m
    io2 = io1 + nl
    ith = io2 + nl
    ikx = ith + nth
    izf = ikx + 1
    ix = izf + nth * q
    iaf = ix + q
    N = iaf + m

    pcol, bp = _obs_cols(cfg.plant_tf)
    mcol, bm = _obs_cols(cfg.ref_prime_tf)
    km = cfg.km
    ell = tuple(float(v) for v in cfg.ell)
    lamrow = _lam_row(cfg.lam)
    fcol = cfg.f_cols[0]
    wfcol, bwf = cfg.wf_cols
    g = cfg.gamma * cfg.sign_kp
    gamma = cfg.gamma
    rfun = cfg.rfun
    iy, iym = ip + n - 1, im + m - 1
    widx = tuple(range(io1, io1 + nl)) + (iy,) + tuple(range(io2, io2 + nl))
    zidx = tuple(izf + j * q + q - 1 for j in range(nth))

    def rhs(t, X, dX):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        u = X[ith] * r
        for j in range(nth - 1):
            u += X[ith + 1 + j] * X[widx[j]]
        thz = 0.0
        zz = 0.0
        for j in range(nth):
            zj = X[zidx[j]]
            thz += X[ith + j] * zj
            zz += zj * zj
        echi = thz - X[ix + q - 1]
        ea = ey + X[iaf + m - 1]
        gea = -g * ea
        prev = 0.0
        for i in range(n):
            dX[ip + i] = prev + pcol[i] * y + bp[i] * u
            prev = X[ip + i]
        ym = X[iym]
        kmr = km * r
        prev = 0.0
        for i in range(m):
            dX[im + i] = prev + mcol[i] * ym + bm[i] * kmr - ell[i] * ey
            prev = X[im + i]
        for i in range(nl - 1):
            dX[io1 + i] = X[io1 + i + 1]
            dX[io2 + i] = X[io2 + i + 1]
        if nl:
            acc1 = u
            acc2 = y
            for j in range(nl):
                acc1 += lamrow[j] * X[io1 + j]
                acc2 += lamrow[j] * X[io2 + j]
            dX[io1 + nl - 1] = acc1
            dX[io2 + nl - 1] = acc2
        for j in range(nth):
            dX[ith + j] = gea * X[zidx[j]]
        dX[ikx] = -gamma * ea * echi
        for j in range(nth):
            base = izf + j * q
            last = X[base + q - 1]
            w = r if j == 0 else X[widx[j - 1]]
            prev = w
            for i in range(q):
                dX[base + i] = prev + fcol[i] * last
                prev = X[base + i]
        last = X[ix + q - 1]
        prev = u
        for i in range(q):
            dX[ix + i] = prev + fcol[i] * last
            prev = X[ix + i]
        aug_in = X[ikx] * echi - ea * zz
        last = X[iaf + m - 1]
        prev = 0.0
        for i in range(m):
            dX[iaf + i] = prev + wfcol[i] * last + bwf[i] * aug_in
            prev = X[iaf + i]

    def outputs(t, X):
        r = rfun(t)
        y = X[iy]
        ey = y - X[iym]
        u = X[ith] * r
        tn = X[ith] * X[ith]
        wn = r * r
        for j in range(nth - 1):
            thj = X[ith + 1 + j]
            wj = X[widx[j]]
            u += thj * wj
            tn += thj * thj
            wn += wj * wj
        thz = 0.0
        zz = 0.0
        for j in range(nth):
            zj = X[zidx[j]]
            thz += X[ith + j] * zj
            zz += zj * zj
        echi = thz - X[ix + q - 1]
        ea = ey + X[iaf + m - 1]
        tdn = gamma * abs(ea) * sqrt(zz)
        return (r, y, X[iym], ey, u, sqrt(tn), ea, echi, X[ikx],
                sqrt(wn), tdn)

    x0 = [0.0] * N
    x0[ip:ip + n] = cfg.x_p0
    x0[im:im + m] = cfg.x_m0
    x0[ith:ith + nth] = cfg.theta0
    x0[ikx] = cfg.k_chi0
    names = (_names("x_p", n) + _names("x_m", m) + _names("omega1", nl)
             + _names("omega2", nl) + _names("theta", nth) + ["k_chi"]
             + _names("zeta_filter", nth * q) + _names("chi_filter", q)
             + _names("aug_filter", m))
    out_names = ("r", "y", "ym", "ey", "u", "theta_norm", "ea", "echi",
                 "kchi", "omegabar_norm", "thetadot_norm")
    return LoopSpec(x0, rhs, outputs, out_names, names, ith, nth)
