//! Multifrontal sparse LU with partial pivoting inside each front.

use num_complex::Complex;

use super::csr::CsrMatrix;
use super::ordering::{analyze, Symbolic};
use super::SolverError;
use crate::scalar::{czero, Real};

/// Panel width of the blocked front factorization.
const PANEL: usize = 64;
const MR: usize = 2;
const NR: usize = 4;
/// Column chunk of the packed right-hand factor kept hot in cache.
const NC: usize = 256;

#[derive(Debug, Clone)]
struct FrontFactor<T> {
    pivots: Vec<usize>,
    border: Vec<usize>,
    /// Row `i` of the factored pivot block came from local pivot row `perm[i]`.
    perm: Vec<usize>,
    lu11: Vec<Complex<T>>,
    u12: Vec<Complex<T>>,
    l21: Vec<Complex<T>>,
}

/// Factorization statistics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FactorStats {
    pub fronts: usize,
    pub largest_front: usize,
    /// Stored complex entries of `L` and `U`.
    pub factor_entries: usize,
}

/// Sparse LU factors `P A Q = L U`, immutable once built.
#[derive(Debug, Clone)]
pub struct SparseLu<T> {
    n: usize,
    fronts: Vec<FrontFactor<T>>,
    stats: FactorStats,
}

impl<T: Real> SparseLu<T> {
    /// Orders, analyzes and factorizes a square matrix.
    ///
    /// A pivot smaller than `1e-13 · max |a_ij|` within the fully summed
    /// rows of its front is reported as [`SolverError::SingularMatrix`].
    pub fn factor(a: &CsrMatrix<T>) -> Result<Self, SolverError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(SolverError::DimensionMismatch { expected: n, got: a.ncols() });
        }
        let sym = analyze(n, a.row_ptr(), a.col_idx());
        numeric(a, &sym)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn stats(&self) -> FactorStats {
        self.stats
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>, SolverError> {
        if b.len() != self.n {
            return Err(SolverError::DimensionMismatch { expected: self.n, got: b.len() });
        }
        let mut x = b.to_vec();
        let mut y = Vec::new();
        for f in &self.fronts {
            let p = f.pivots.len();
            y.clear();
            y.extend(f.perm.iter().map(|&r| x[f.pivots[r]]));
            for i in 0..p {
                let row = &f.lu11[i * p..i * p + i];
                let s = row.iter().zip(&y[..i]).fold(czero(), |s, (l, v)| s + *l * *v);
                y[i] -= s;
            }
            for (r, &bv) in f.border.iter().enumerate() {
                let row = &f.l21[r * p..(r + 1) * p];
                let s = row.iter().zip(&y).fold(czero(), |s, (l, v)| s + *l * *v);
                x[bv] -= s;
            }
            for (i, &v) in f.pivots.iter().enumerate() {
                x[v] = y[i];
            }
        }
        for f in self.fronts.iter().rev() {
            let p = f.pivots.len();
            let nb = f.border.len();
            y.clear();
            for (i, &v) in f.pivots.iter().enumerate() {
                let row = &f.u12[i * nb..(i + 1) * nb];
                let s = row.iter().zip(&f.border).fold(czero(), |s, (u, &bv)| s + *u * x[bv]);
                y.push(x[v] - s);
            }
            for i in (0..p).rev() {
                let row = &f.lu11[i * p..(i + 1) * p];
                let mut s = y[i];
                for j in i + 1..p {
                    s -= row[j] * y[j];
                }
                y[i] = s / row[i];
            }
            for (i, &v) in f.pivots.iter().enumerate() {
                x[v] = y[i];
            }
        }
        Ok(x)
    }
}

/// Transposed copy of the matrix in CSR form (i.e. its CSC view).
fn columns<T: Real>(a: &CsrMatrix<T>) -> (Vec<usize>, Vec<usize>, Vec<Complex<T>>) {
    let n = a.ncols();
    let mut ptr = vec![0usize; n + 1];
    for &c in a.col_idx() {
        ptr[c + 1] += 1;
    }
    for i in 0..n {
        ptr[i + 1] += ptr[i];
    }
    let mut next = ptr.clone();
    let mut rows = vec![0usize; a.nnz()];
    let mut vals = vec![czero(); a.nnz()];
    for r in 0..a.nrows() {
        let (cols, v) = a.row(r);
        for (&c, &x) in cols.iter().zip(v) {
            rows[next[c]] = r;
            vals[next[c]] = x;
            next[c] += 1;
        }
    }
    (ptr, rows, vals)
}

fn numeric<T: Real>(a: &CsrMatrix<T>, sym: &Symbolic) -> Result<SparseLu<T>, SolverError> {
    let n = a.nrows();
    let tol = T::lit(1e-13) * a.max_abs();
    let (cptr, crow, cval) = columns(a);
    let nsn = sym.supernodes.len();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); nsn];
    for (s, sn) in sym.supernodes.iter().enumerate() {
        if let Some(p) = sn.parent {
            children[p].push(s);
        }
    }
    let mut contrib: Vec<Option<Vec<Complex<T>>>> = vec![None; nsn];
    let mut map = vec![usize::MAX; n];
    let mut fronts = Vec::with_capacity(nsn);
    let mut stats = FactorStats {
        fronts: nsn,
        ..Default::default()
    };

    for (s, sn) in sym.supernodes.iter().enumerate() {
        let p = sn.pivots.len();
        let nb = sn.border.len();
        let nf = p + nb;
        for (l, &v) in sn.pivots.iter().chain(&sn.border).enumerate() {
            map[v] = l;
        }
        let first = sym.var_pos[sn.pivots[0]];
        let mut f = vec![czero::<T>(); nf * nf];
        for (lv, &v) in sn.pivots.iter().enumerate() {
            let (cols, vals) = a.row(v);
            for (&c, &x) in cols.iter().zip(vals) {
                if sym.var_pos[c] >= first {
                    debug_assert!(map[c] != usize::MAX);
                    f[lv * nf + map[c]] += x;
                }
            }
            for k in cptr[v]..cptr[v + 1] {
                let r = crow[k];
                let lr = map[r];
                if sym.var_pos[r] >= first && lr >= p {
                    f[lr * nf + lv] += cval[k];
                }
            }
        }
        for &c in &children[s] {
            let cb = contrib[c].take().expect("child processed before parent");
            let cborder = &sym.supernodes[c].border;
            let idx: Vec<usize> = cborder.iter().map(|&v| map[v]).collect();
            let m = idx.len();
            for (i, &ri) in idx.iter().enumerate() {
                let dst = &mut f[ri * nf..(ri + 1) * nf];
                for (j, &cj) in idx.iter().enumerate() {
                    dst[cj] += cb[i * m + j];
                }
            }
        }

        let perm = factor_front(&mut f, nf, p, tol).map_err(|k| SolverError::SingularMatrix { pivot: Some(first + k) })?;

        let mut lu11 = Vec::with_capacity(p * p);
        let mut u12 = Vec::with_capacity(p * nb);
        for i in 0..p {
            lu11.extend_from_slice(&f[i * nf..i * nf + p]);
            u12.extend_from_slice(&f[i * nf + p..(i + 1) * nf]);
        }
        let mut l21 = Vec::with_capacity(nb * p);
        let mut cb = Vec::with_capacity(nb * nb);
        for i in p..nf {
            l21.extend_from_slice(&f[i * nf..i * nf + p]);
            cb.extend_from_slice(&f[i * nf + p..(i + 1) * nf]);
        }
        if sn.parent.is_some() {
            contrib[s] = Some(cb);
        }
        for &v in sn.pivots.iter().chain(&sn.border) {
            map[v] = usize::MAX;
        }
        stats.largest_front = stats.largest_front.max(nf);
        stats.factor_entries += p * p + 2 * p * nb;
        fronts.push(FrontFactor {
            pivots: sn.pivots.clone(),
            border: sn.border.clone(),
            perm,
            lu11,
            u12,
            l21,
        });
    }
    Ok(SparseLu { n, fronts, stats })
}

/// Eliminates the first `p` columns of the row-major `nf × nf` front in
/// place, choosing pivots among the first `p` rows only. Returns the row
/// permutation, or the local index of a column without an acceptable pivot.
fn factor_front<T: Real>(f: &mut [Complex<T>], nf: usize, p: usize, tol: T) -> Result<Vec<usize>, usize> {
    let mut perm: Vec<usize> = (0..p).collect();
    let one = Complex::new(T::one(), T::zero());
    for kb in (0..p).step_by(PANEL) {
        let ke = (kb + PANEL).min(p);
        for k in kb..ke {
            let (mut r, mut best) = (k, -T::one());
            for i in k..p {
                let v = f[i * nf + k].norm();
                if v > best {
                    r = i;
                    best = v;
                }
            }
            if !(best > tol) {
                return Err(k);
            }
            if r != k {
                let (lo, hi) = f.split_at_mut(r * nf);
                lo[k * nf..(k + 1) * nf].swap_with_slice(&mut hi[..nf]);
                perm.swap(k, r);
            }
            let inv = one / f[k * nf + k];
            let (top, rest) = f.split_at_mut((k + 1) * nf);
            let prow = &top[k * nf + k + 1..k * nf + ke];
            for row in rest.chunks_exact_mut(nf) {
                let l = row[k] * inv;
                row[k] = l;
                if l != czero() {
                    for (x, &u) in row[k + 1..ke].iter_mut().zip(prow) {
                        *x -= l * u;
                    }
                }
            }
        }
        if ke == nf {
            continue;
        }
        // block row of U: unit lower solve within the panel
        for k in kb..ke {
            let (top, rest) = f.split_at_mut((k + 1) * nf);
            let prow = &top[k * nf + ke..(k + 1) * nf];
            for row in rest[..(ke - k - 1) * nf].chunks_exact_mut(nf) {
                let l = row[k];
                if l != czero() {
                    for (x, &u) in row[ke..].iter_mut().zip(prow) {
                        *x -= l * u;
                    }
                }
            }
        }
        // trailing update
        let kk = ke - kb;
        let m = nf - ke;
        let ap = pack_a(f, nf, ke, m, kb, kk);
        let bp = pack_b(f, nf, kb, kk, ke, m);
        gemm_sub(f, nf, ke, ke, m, m, kk, &ap, &bp);
    }
    Ok(perm)
}

/// Packs rows `r0..r0+m`, columns `c0..c0+kk` into `MR`-row micro panels,
/// planar real/imaginary, zero padded.
fn pack_a<T: Real>(f: &[Complex<T>], ld: usize, r0: usize, m: usize, c0: usize, kk: usize) -> Vec<T> {
    let blocks = m.div_ceil(MR);
    let mut out = vec![T::zero(); blocks * kk * 2 * MR];
    for ib in 0..blocks {
        let base = ib * kk * 2 * MR;
        for r in 0..MR {
            let i = ib * MR + r;
            if i >= m {
                break;
            }
            let row = &f[(r0 + i) * ld + c0..(r0 + i) * ld + c0 + kk];
            for (pp, z) in row.iter().enumerate() {
                out[base + pp * 2 * MR + r] = z.re;
                out[base + pp * 2 * MR + MR + r] = z.im;
            }
        }
    }
    out
}

/// Packs rows `r0..r0+kk`, columns `c0..c0+n` into `NR`-column micro
/// panels, planar real/imaginary, zero padded.
fn pack_b<T: Real>(f: &[Complex<T>], ld: usize, r0: usize, kk: usize, c0: usize, n: usize) -> Vec<T> {
    let blocks = n.div_ceil(NR);
    let mut out = vec![T::zero(); blocks * kk * 2 * NR];
    for pp in 0..kk {
        let row = &f[(r0 + pp) * ld + c0..(r0 + pp) * ld + c0 + n];
        for (j, z) in row.iter().enumerate() {
            let (jb, c) = (j / NR, j % NR);
            let at = jb * kk * 2 * NR + pp * 2 * NR;
            out[at + c] = z.re;
            out[at + NR + c] = z.im;
        }
    }
    out
}

/// `C -= A B` where `C` is the `m × n` block of `f` at `(r0, c0)`.
#[allow(clippy::too_many_arguments)]
fn gemm_sub<T: Real>(
    f: &mut [Complex<T>],
    ld: usize,
    r0: usize,
    c0: usize,
    m: usize,
    n: usize,
    kk: usize,
    ap: &[T],
    bp: &[T],
) {
    let nblocks = n.div_ceil(NR);
    let chunk = NC / NR;
    for jc in (0..nblocks).step_by(chunk) {
        let jend = (jc + chunk).min(nblocks);
        for ib in 0..m.div_ceil(MR) {
            let a = &ap[ib * kk * 2 * MR..(ib + 1) * kk * 2 * MR];
            for jb in jc..jend {
                let b = &bp[jb * kk * 2 * NR..(jb + 1) * kk * 2 * NR];
                let (re, im) = micro_kernel(a, b, kk);
                for r in 0..MR {
                    let i = ib * MR + r;
                    if i >= m {
                        break;
                    }
                    let row = &mut f[(r0 + i) * ld + c0..(r0 + i) * ld + c0 + n];
                    for c in 0..NR {
                        let j = jb * NR + c;
                        if j < n {
                            row[j] -= Complex::new(re[r][c], im[r][c]);
                        }
                    }
                }
            }
        }
    }
}

#[inline(always)]
fn micro_kernel<T: Real>(a: &[T], b: &[T], kk: usize) -> ([[T; NR]; MR], [[T; NR]; MR]) {
    let mut re = [[T::zero(); NR]; MR];
    let mut im = [[T::zero(); NR]; MR];
    for pp in 0..kk {
        let ar: &[T] = &a[pp * 2 * MR..pp * 2 * MR + MR];
        let ai: &[T] = &a[pp * 2 * MR + MR..(pp + 1) * 2 * MR];
        let br: &[T] = &b[pp * 2 * NR..pp * 2 * NR + NR];
        let bi: &[T] = &b[pp * 2 * NR + NR..(pp + 1) * 2 * NR];
        for r in 0..MR {
            for c in 0..NR {
                re[r][c] = re[r][c] + ar[r] * br[c] - ai[r] * bi[c];
                im[r][c] = im[r][c] + ar[r] * bi[c] + ai[r] * br[c];
            }
        }
    }
    (re, im)
}
