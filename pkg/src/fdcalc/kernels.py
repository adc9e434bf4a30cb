"""Hot inner loops, each in a numba flavour and a vectorised numpy flavour.

All arrays are ``int64``. A function table is an ``(order, k)`` array whose
row ``i`` holds the codomain residues of the element with mixed-radix index
``i`` (coordinate 1 least significant). ``dom_moduli``/``cod_moduli`` are the
cyclic orders of domain and codomain factors.

The public functions dispatch to the numba kernels unless numba is missing
or ``FDCALC_DISABLE_NUMBA`` is set; :func:`set_backend` switches at runtime.
"""
from __future__ import annotations


import numpy as np

from . import _accel
from ._accel import njit

_backend = "numba" if _accel.USE_NUMBA else "numpy"


def backend() -> str:
    return _backend


def set_backend(name: str) -> None:
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not _accel.NUMBA_AVAILABLE:
        raise RuntimeError("numba is not installed")
    _backend = name


def _i64(a) -> np.ndarray:
    return np.ascontiguousarray(a, dtype=np.int64)


def axis_transform(modulus: int, cap: int, e: int) -> np.ndarray:
    """Rows n = 0..cap of the map  G -> Delta^n G(0)  for an m-periodic G.

    Entry ``[n, r]`` is  sum_{j<=n, j=r mod m} (-1)^(n-j) C(n, j)  reduced mod e.
    Built row by row from Delta^(n+1) G(0) = Delta^n G(1) - Delta^n G(0).
    """
    t = np.zeros((cap + 1, modulus), dtype=np.int64)
    t[0, 0] = 1 % e
    for n in range(cap):
        t[n + 1] = (np.roll(t[n], 1) - t[n]) % e
    return t


# --------------------------------------------------------------------------
# numpy flavour

def _delta_axis_np(values, dom_moduli, axis, cod_moduli):
    n = len(dom_moduli)
    k = values.shape[1]
    arr = values.reshape(tuple(int(m) for m in dom_moduli[::-1]) + (k,))
    ax = n - 1 - axis
    out = np.roll(arr, -1, axis=ax) - arr
    out %= cod_moduli
    return out.reshape(values.shape)


def _fdeg_search_np(values, dom_moduli, cod_moduli, caps):
    if not values.any():
        return -1
    n = len(caps)
    rem = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        rem[i] = rem[i + 1] + int(caps[i])
    best = 0

    def visit(level, table, total):
        nonlocal best
        h, c = table, 0
        while True:
            t = total + c
            best = max(best, t)
            if level + 1 < n and t + rem[level + 1] > best:
                visit(level + 1, h, t)
            if c == caps[level] or total + caps[level] + rem[level + 1] <= best:
                return
            h = _delta_axis_np(h, dom_moduli, level, cod_moduli)
            c += 1
            if not h.any():
                return

    visit(0, values, 0)
    return best


def _coefficients_np(values, dom_moduli, cod_moduli, mats, caps):
    n = len(dom_moduli)
    k = values.shape[1]
    e = int(cod_moduli.max())
    arr = values.reshape(tuple(int(m) for m in dom_moduli[::-1]) + (k,))
    for i in range(n):
        ax = n - 1 - i
        t = mats[i, : caps[i] + 1, : dom_moduli[i]]
        arr = np.moveaxis(np.tensordot(t, arr, axes=([1], [ax])), 0, ax) % e
    arr = arr % cod_moduli
    return np.ascontiguousarray(arr.reshape(-1, k))


def _sigma_scan_np(T, box_deg, cod_moduli, n_dom, max_deg, chunk=1 << 14):
    border = int(np.prod(cod_moduli))
    total = border**n_dom
    b_strides = np.cumprod(np.concatenate(([1], cod_moduli[:-1]))).astype(np.int64)
    x_pows = border ** np.arange(n_dom, dtype=np.int64)
    hist_all = np.zeros(max_deg + 2, dtype=np.int64)
    hist_nz = np.zeros(max_deg + 2, dtype=np.int64)
    for start in range(0, total, chunk):
        F = np.arange(start, min(start + chunk, total), dtype=np.int64)
        digits = (F[:, None] // x_pows) % border
        vals = (digits[:, :, None] // b_strides) % cod_moduli
        coeffs = np.einsum("bx,cxk->cbk", T, vals) % cod_moduli
        nz = coeffs.any(axis=2)
        deg = np.where(nz, box_deg[None, :], -1).max(axis=1)
        sums_nz = (vals.sum(axis=1) % cod_moduli).any(axis=1)
        hist_all += np.bincount(deg + 1, minlength=max_deg + 2)
        hist_nz += np.bincount(deg[sums_nz] + 1, minlength=max_deg + 2)
    return hist_all, hist_nz


def _count_common_zeros_np(stack):
    return int((stack == 0).all(axis=(0, 2)).sum())


def _rng_mul_np(x, y, mult, p):
    m, d = x.shape
    prod = (x[:, :, None] * y[:, None, :]).reshape(m, d * d)
    return (prod @ mult.reshape(d * d, d)) % p


def _rng_pow_np(x, e, mult, p):
    result = None
    base = x
    while True:
        if e & 1:
            result = base if result is None else _rng_mul_np(result, base, mult, p)
        e >>= 1
        if not e:
            return result
        base = _rng_mul_np(base, base, mult, p)


def _poly_table_np(points, coeffs, exps, mult, p):
    m, n, d = points.shape
    out = np.zeros((m, d), dtype=np.int64)
    for t in range(coeffs.shape[0]):
        acc = None
        for v in range(n):
            if exps[t, v] == 0:
                continue
            pw = _rng_pow_np(points[:, v, :], int(exps[t, v]), mult, p)
            acc = pw if acc is None else _rng_mul_np(acc, pw, mult, p)
        c = np.broadcast_to(coeffs[t], (m, d))
        out += c if acc is None else _rng_mul_np(np.ascontiguousarray(c), acc, mult, p)
        out %= p
    return out


# --------------------------------------------------------------------------
# numba flavour

@njit
def _all_zero_nb(a):
    for i in range(a.shape[0]):
        for c in range(a.shape[1]):
            if a[i, c] != 0:
                return False
    return True


@njit
def _delta_into_nb(src, dst, stride, m, cod_moduli):
    order, k = src.shape
    for idx in range(order):
        digit = (idx // stride) % m
        nxt = idx + stride if digit < m - 1 else idx - (m - 1) * stride
        for c in range(k):
            dst[idx, c] = (src[nxt, c] - src[idx, c]) % cod_moduli[c]


@njit
def _delta_axis_nb(values, dom_moduli, axis, cod_moduli):
    stride = 1
    for i in range(axis):
        stride *= dom_moduli[i]
    out = np.empty_like(values)
    _delta_into_nb(values, out, stride, dom_moduli[axis], cod_moduli)
    return out


@njit
def _fdeg_search_nb(values, dom_moduli, cod_moduli, caps):
    order, k = values.shape
    n = dom_moduli.shape[0]
    if _all_zero_nb(values):
        return -1
    strides = np.ones(n, np.int64)
    for i in range(1, n):
        strides[i] = strides[i - 1] * dom_moduli[i - 1]
    rem = np.zeros(n + 1, np.int64)
    for i in range(n - 1, -1, -1):
        rem[i] = rem[i + 1] + caps[i]
    buf = np.empty((n, order, k), np.int64)
    tmp = np.empty((order, k), np.int64)
    cnt = np.zeros(n, np.int64)
    base = np.zeros(n, np.int64)
    buf[0] = values
    level = 0
    best = 0
    while True:
        t = base[level] + cnt[level]
        if t > best:
            best = t
        if level + 1 < n and t + rem[level + 1] > best:
            buf[level + 1] = buf[level]
            cnt[level + 1] = 0
            base[level + 1] = t
            level += 1
            continue
        while True:
            if cnt[level] < caps[level] and base[level] + caps[level] + rem[level + 1] > best:
                _delta_into_nb(buf[level], tmp, strides[level], dom_moduli[level], cod_moduli)
                if not _all_zero_nb(tmp):
                    buf[level] = tmp
                    cnt[level] += 1
                    break
            level -= 1
            if level < 0:
                return best


@njit
def _coefficients_nb(values, dom_moduli, cod_moduli, mats, caps):
    n = dom_moduli.shape[0]
    k = values.shape[1]
    e = 0
    for c in range(k):
        if cod_moduli[c] > e:
            e = cod_moduli[c]
    dims = dom_moduli.copy()
    cur = values.copy()
    for i in range(n):
        stride = 1
        for j in range(i):
            stride *= dims[j]
        m_old = dims[i]
        m_new = caps[i] + 1
        size_new = cur.shape[0] // m_old * m_new
        out = np.zeros((size_new, k), np.int64)
        for o in range(size_new):
            low = o % stride
            digit = (o // stride) % m_new
            high = o // (stride * m_new)
            base_in = low + high * stride * m_old
            for r in range(m_old):
                w = mats[i, digit, r]
                if w != 0:
                    src = base_in + r * stride
                    for c in range(k):
                        out[o, c] += w * cur[src, c]
            for c in range(k):
                out[o, c] %= e
        cur = out
        dims[i] = m_new
    for o in range(cur.shape[0]):
        for c in range(k):
            cur[o, c] %= cod_moduli[c]
    return cur


@njit
def _sigma_scan_nb(T, box_deg, cod_moduli, n_dom, max_deg):
    box = T.shape[0]
    k = cod_moduli.shape[0]
    border = 1
    for c in range(k):
        border *= cod_moduli[c]
    total = 1
    for _ in range(n_dom):
        total *= border
    # visit coefficient rows by descending degree; the first nonzero one decides
    order = np.argsort(-box_deg)
    hist_all = np.zeros(max_deg + 2, np.int64)
    hist_nz = np.zeros(max_deg + 2, np.int64)
    vals = np.zeros((n_dom, k), np.int64)
    for F in range(total):
        rest = F
        for x in range(n_dom):
            b = rest % border
            rest //= border
            for c in range(k):
                vals[x, c] = b % cod_moduli[c]
                b //= cod_moduli[c]
        nz_sum = False
        for c in range(k):
            s = 0
            for x in range(n_dom):
                s += vals[x, c]
            if s % cod_moduli[c] != 0:
                nz_sum = True
        deg = -1
        for oi in range(box):
            bi = order[oi]
            hit = False
            for c in range(k):
                acc = 0
                for x in range(n_dom):
                    acc += T[bi, x] * vals[x, c]
                if acc % cod_moduli[c] != 0:
                    hit = True
                    break
            if hit:
                deg = box_deg[bi]
                break
        hist_all[deg + 1] += 1
        if nz_sum:
            hist_nz[deg + 1] += 1
    return hist_all, hist_nz


@njit
def _count_common_zeros_nb(stack):
    r, order, k = stack.shape
    count = 0
    for i in range(order):
        ok = True
        for j in range(r):
            for c in range(k):
                if stack[j, i, c] != 0:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            count += 1
    return count


@njit
def _rng_mul_into_nb(x, y, mult, p, out):
    d = x.shape[0]
    for kk in range(d):
        out[kk] = 0
    for i in range(d):
        if x[i] == 0:
            continue
        for j in range(d):
            if y[j] == 0:
                continue
            w = x[i] * y[j]
            for kk in range(d):
                out[kk] += w * mult[i, j, kk]
    for kk in range(d):
        out[kk] %= p


@njit
def _poly_table_nb(points, coeffs, exps, mult, p):
    m, n, d = points.shape
    out = np.zeros((m, d), np.int64)
    acc = np.empty(d, np.int64)
    base = np.empty(d, np.int64)
    pw = np.empty(d, np.int64)
    scratch = np.empty(d, np.int64)
    for pt in range(m):
        for t in range(coeffs.shape[0]):
            have_acc = False
            for v in range(n):
                e = exps[t, v]
                if e == 0:
                    continue
                base[:] = points[pt, v]
                have_pw = False
                while True:
                    if e & 1:
                        if have_pw:
                            _rng_mul_into_nb(pw, base, mult, p, scratch)
                            pw[:] = scratch
                        else:
                            pw[:] = base
                            have_pw = True
                    e >>= 1
                    if e == 0:
                        break
                    _rng_mul_into_nb(base, base, mult, p, scratch)
                    base[:] = scratch
                if have_acc:
                    _rng_mul_into_nb(acc, pw, mult, p, scratch)
                    acc[:] = scratch
                else:
                    acc[:] = pw
                    have_acc = True
            if have_acc:
                _rng_mul_into_nb(coeffs[t], acc, mult, p, scratch)
                for kk in range(d):
                    out[pt, kk] = (out[pt, kk] + scratch[kk]) % p
            else:
                for kk in range(d):
                    out[pt, kk] = (out[pt, kk] + coeffs[t, kk]) % p
    return out


# --------------------------------------------------------------------------
# dispatch

def _pick(np_fn, nb_fn):
    return nb_fn if _backend == "numba" else np_fn


def delta_axis(values, dom_moduli, axis, cod_moduli):
    """Delta along the ``axis``-th standard generator (0-based)."""
    return _pick(_delta_axis_np, _delta_axis_nb)(
        _i64(values), _i64(dom_moduli), int(axis), _i64(cod_moduli)
    )


def fdeg_search(values, dom_moduli, cod_moduli, caps) -> int:
    """Largest |n| over the box n_i <= caps[i] with Delta^n f not identically zero.

    Returns -1 for the zero table.
    """
    return int(
        _pick(_fdeg_search_np, _fdeg_search_nb)(
            _i64(values), _i64(dom_moduli), _i64(cod_moduli), _i64(caps)
        )
    )


def pack_transforms(dom_moduli, caps, e) -> np.ndarray:
    n = len(dom_moduli)
    mats = np.zeros((n, int(max(caps)) + 1, int(max(dom_moduli))), dtype=np.int64)
    for i, (m, c) in enumerate(zip(dom_moduli, caps)):
        mats[i, : c + 1, :m] = axis_transform(int(m), int(c), int(e))
    return mats


def coefficients_at_zero(values, dom_moduli, cod_moduli, caps) -> np.ndarray:
    """``Delta^n F(0)`` for every n in the box, rows in mixed radix over ``caps + 1``."""
    cod = _i64(cod_moduli)
    mats = pack_transforms(dom_moduli, caps, int(cod.max()))
    return _pick(_coefficients_np, _coefficients_nb)(
        _i64(values), _i64(dom_moduli), cod, mats, _i64(caps)
    )


def sigma_scan(T, box_deg, cod_moduli, n_dom, max_deg):
    """Histogram of all functions ``A -> B`` by degree, and of those with nonzero sum.

    ``T`` maps a table column to its coefficients at 0, ``box_deg`` gives |n|
    per coefficient row. Index ``d + 1`` of each histogram counts degree d;
    index 0 counts the zero function.
    """
    a, b = _pick(_sigma_scan_np, _sigma_scan_nb)(
        _i64(T), _i64(box_deg), _i64(cod_moduli), int(n_dom), int(max_deg)
    )
    return np.asarray(a), np.asarray(b)


def count_common_zeros(stack) -> int:
    """Number of rows where every table in the ``(r, order, k)`` stack vanishes."""
    stack = _i64(stack)
    if stack.shape[0] == 0:
        return int(stack.shape[1])
    return int(_pick(_count_common_zeros_np, _count_common_zeros_nb)(stack))


def poly_table(points, coeffs, exps, mult, p) -> np.ndarray:
    """Evaluate a sparse polynomial over a structure-constant rng at many points.

    ``points`` is ``(M, n, dim)``; ``coeffs`` ``(terms, dim)``; ``exps``
    ``(terms, n)``; ``mult[i, j]`` is the product of basis vectors i and j.
    """
    return _pick(_poly_table_np, _poly_table_nb)(
        _i64(points), _i64(coeffs).reshape(-1, points.shape[2]), _i64(exps).reshape(-1, points.shape[1]),
        _i64(mult), int(p)
    )
