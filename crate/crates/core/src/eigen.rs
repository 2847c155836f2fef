//! Eigensolvers for the generalized symmetric pencil (K, M).
//!
//! The production path is shift-invert Lanczos: with σ strictly below the
//! pencil spectrum (the form's lower bound supplies one), C = K - σM is
//! positive definite, C = LLᵀ factors banded, and Lanczos on the transformed
//! operator T = L⁻¹ M L⁻ᵀ turns the bottom of the pencil spectrum into the
//! dominant eigenvalues θ = 1/(λ - σ). Full reorthogonalization keeps ghost
//! pairs out at the desk-scale dimensions this crate targets.
//!
//! The dense oracle cross-checks small pencils along an entirely different
//! route: dense Cholesky of M followed by cyclic Jacobi rotations.

use crate::band::{band_ldlt_inertia, BandCholesky, BandMatrix};
use crate::error::{Result, SpectralError};
use crate::strip::OperatorPencil;

fn finish(result: Option<EigenResult>, tol: f64, iterations: usize) -> Result<EigenResult> {
    match result {
        Some(r) if r.residuals.iter().all(|&x| x < tol) => Ok(r),
        Some(r) => Err(SpectralError::NoConvergence { iterations, residuals: r.residuals }),
        None => Err(SpectralError::NoConvergence { iterations, residuals: Vec::new() }),
    }
}

/// Hard cap on the dense-oracle dimension.
pub const DENSE_ORACLE_MAX: usize = 2000;

/// Hard cap on the Krylov subspace dimension.
const MAX_LANCZOS: usize = 320;

/// Fixed seed: reruns of every solver are bit-reproducible.
const LANCZOS_SEED: u64 = 0x0b1e_55ed_cafe_f00d;

/// Eigenpairs of the pencil: K v = λ M v with M-orthonormal vectors.
#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// M-orthonormal eigenvectors, one per eigenvalue.
    pub vectors: Vec<Vec<f64>>,
    /// Relative residuals ‖Kv - λMv‖ / ((|λ|+1)‖Mv‖).
    pub residuals: Vec<f64>,
    /// Lanczos steps performed.
    pub iterations: usize,
    /// Spectral shift σ used by the transformation.
    pub shift: f64,
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x.iter()) {
        *yi += alpha * xi;
    }
}

/// The k algebraically smallest eigenpairs of the pencil, with relative
/// residual below `tol` for every returned pair.
///
/// The shift is σ = spectral_floor - 1, strictly below the spectrum, so the
/// banded Cholesky of K - σM cannot fail on a correctly assembled pencil.
pub fn smallest_eigenpairs(pencil: &OperatorPencil, k: usize, tol: f64) -> Result<EigenResult> {
    let n = pencil.n();
    if k == 0 || 4 * k > n {
        return Err(SpectralError::InvalidParameter(format!(
            "need 1 <= k <= dimension/4, got k = {k} with dimension {n}"
        )));
    }
    if !(tol > 0.0) {
        return Err(SpectralError::InvalidParameter("tol must be positive".into()));
    }

    let sigma = pencil.spectral_floor() - 1.0;
    let shifted = BandMatrix::scaled_sum(pencil.stiffness(), pencil.mass(), 1.0, -sigma);
    let chol = BandCholesky::factor(&shifted).map_err(|e| {
        SpectralError::FactorizationFailed(format!(
            "K - σM with σ = {sigma} is not positive definite ({e}); \
             the assembled pencil violates its lower bound"
        ))
    })?;

    // T v = L⁻¹ M L⁻ᵀ v
    let apply_t = |v: &[f64]| -> Vec<f64> {
        let t = chol.backward(v);
        let t = pencil.mass().matvec(&t);
        chol.forward(&t)
    };

    let max_m = n.min(MAX_LANCZOS.max(8 * k));
    let mut rng = SplitMix64(LANCZOS_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut checkpoint = (2 * k + 16).min(max_m);
    let mut best: Option<EigenResult> = None;

    loop {
        let j = alphas.len();
        let mut w = apply_t(&basis[j]);
        let a_j = dot(&w, &basis[j]);
        alphas.push(a_j);
        axpy(&mut w, -a_j, &basis[j]);
        if j > 0 {
            axpy(&mut w, -betas[j - 1], &basis[j - 1]);
        }
        // full reorthogonalization, two classical Gram-Schmidt passes
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                axpy(&mut w, -c, q);
            }
        }
        let b_j = norm(&w);
        let scale = alphas.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if b_j <= 1e-13 * scale.max(1.0) {
            // invariant subspace: restart the recurrence in a fresh direction
            betas.push(0.0);
            let mut fresh: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&fresh, q);
                    axpy(&mut fresh, -c, q);
                }
            }
            let nf = norm(&fresh);
            if nf < 1e-8 || basis.len() == n {
                // Krylov space exhausted the whole space
                let m = alphas.len();
                let result = extract(pencil, &chol, sigma, &basis, &alphas, &betas, k, m);
                return finish(result, tol, m);
            }
            fresh.iter_mut().for_each(|x| *x /= nf);
            basis.push(fresh);
        } else {
            betas.push(b_j);
            let mut next = w;
            next.iter_mut().for_each(|x| *x /= b_j);
            basis.push(next);
        }

        let m = alphas.len();
        if m >= checkpoint || m == max_m {
            let (theta, z) = tridiag_eigen(&alphas, &betas[..m - 1]);
            // k largest θ = k smallest λ; θ is ascending after the sort
            let selected: Vec<usize> = (m - k.min(m)..m).collect();
            let theta_min = selected.iter().map(|&i| theta[i]).fold(f64::MAX, f64::min);
            let bound_ok = selected.len() == k
                && selected.iter().all(|&i| {
                    let last = z[(m - 1) * m + i].abs();
                    betas[m - 1] * last <= tol * 1e-2 * theta_min.abs().max(1e-300)
                });
            if bound_ok || m == max_m {
                match extract(pencil, &chol, sigma, &basis, &alphas, &betas, k, m) {
                    Some(result) => {
                        let worst = result.residuals.iter().fold(0.0f64, |a, r| a.max(*r));
                        if worst < tol {
                            return Ok(result);
                        }
                        if m == max_m {
                            return Err(SpectralError::NoConvergence {
                                iterations: m,
                                residuals: result.residuals,
                            });
                        }
                        best = Some(result);
                    }
                    None if m == max_m => {
                        return Err(SpectralError::NoConvergence {
                            iterations: m,
                            residuals: best.map(|b| b.residuals).unwrap_or_default(),
                        });
                    }
                    None => {}
                }
            }
            checkpoint = (m + 24).min(max_m);
        }
    }
}

/// Ritz extraction: map the k dominant θ back to pencil eigenpairs,
/// M-orthonormalize, and measure true residuals.
fn extract(
    pencil: &OperatorPencil,
    chol: &BandCholesky,
    sigma: f64,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    k: usize,
    m: usize,
) -> Option<EigenResult> {
    let n = pencil.n();
    let (theta, z) = tridiag_eigen(alphas, &betas[..m - 1]);
    let take = k.min(m);
    // θ ascending: the last `take` entries are the dominant ones
    let mut pairs: Vec<(f64, usize)> = (m - take..m).map(|i| (theta[i], i)).collect();
    // λ = σ + 1/θ ascending = θ descending
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut values = Vec::with_capacity(take);
    let mut vectors = Vec::with_capacity(take);
    for &(th, idx) in &pairs {
        if th <= 0.0 {
            // T is positive definite; a non-positive Ritz value is noise
            return None;
        }
        let mut y = vec![0.0; n];
        for (j, q) in basis.iter().take(m).enumerate() {
            axpy(&mut y, z[j * m + idx], q);
        }
        let v = chol.backward(&y);
        values.push(sigma + 1.0 / th);
        vectors.push(v);
    }

    // M-orthonormalize (modified Gram-Schmidt in the M inner product); the
    // vectors are already near-orthogonal, this cleans up clustered pairs
    let mut mv_cache: Vec<Vec<f64>> = Vec::with_capacity(take);
    for i in 0..vectors.len() {
        let (done, rest) = vectors.split_at_mut(i);
        let vi = &mut rest[0];
        for (vj, mvj) in done.iter().zip(mv_cache.iter()) {
            let c = dot(vi, mvj);
            let vj = vj.clone();
            axpy(vi, -c, &vj);
        }
        let mvi = pencil.mass().matvec(vi);
        let nm = dot(vi, &mvi).sqrt();
        if !(nm > 0.0) {
            return None;
        }
        vi.iter_mut().for_each(|x| *x /= nm);
        mv_cache.push(mvi.iter().map(|x| x / nm).collect());
    }

    let mut residuals = Vec::with_capacity(take);
    for (lam, v) in values.iter().zip(vectors.iter()) {
        let kv = pencil.stiffness().matvec(v);
        let mv = pencil.mass().matvec(v);
        let mut r = kv;
        axpy(&mut r, -lam, &mv);
        residuals.push(norm(&r) / ((lam.abs() + 1.0) * norm(&mv)));
    }

    Some(EigenResult { values, vectors, residuals, iterations: m, shift: sigma })
}

/// Number of pencil eigenvalues strictly below μ, from the inertia of
/// K - μM (Sylvester's law, banded LDLᵀ). A singular factorization retries
/// with μ perturbed by 1e-10 steps.
pub fn inertia_below(pencil: &OperatorPencil, mu: f64) -> Result<usize> {
    let scale = 1.0 + mu.abs();
    let pivot_tol = 1e-300;
    for shift in [0.0, 1e-10, -1e-10, 1e-9, -1e-9] {
        let a = BandMatrix::scaled_sum(
            pencil.stiffness(),
            pencil.mass(),
            1.0,
            -(mu + shift * scale),
        );
        match band_ldlt_inertia(&a, pivot_tol) {
            Ok(inertia) => return Ok(inertia.negative),
            Err(_) => continue,
        }
    }
    Err(SpectralError::FactorizationFailed(format!(
        "LDLT of K - μM stayed singular near μ = {mu}"
    )))
}

/// Full pencil spectrum by the dense route: Cholesky of M, congruence to a
/// standard symmetric problem, cyclic Jacobi rotations. Refuses dimensions
/// above [`DENSE_ORACLE_MAX`].
pub fn dense_oracle(pencil: &OperatorPencil) -> Result<Vec<f64>> {
    let n = pencil.n();
    if n > DENSE_ORACLE_MAX {
        return Err(SpectralError::DenseTooLarge { dim: n, max: DENSE_ORACLE_MAX });
    }
    let kd = pencil.stiffness().to_dense();
    let md = pencil.mass().to_dense();
    let r = dense_cholesky(&md, n)?;

    // B = R⁻¹ K R⁻ᵀ in two triangular sweeps
    let mut w = kd;
    for col in 0..n {
        forward_column(&r, n, &mut w, col);
    }
    // w = R⁻¹K; now solve (R B)ᵀ = wᵀ row by row: B[i][:] from forward solve
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|j| w[i * n + j]).collect();
        forward_vec(&r, n, &mut row);
        b[i * n..(i + 1) * n].copy_from_slice(&row);
    }
    // enforce symmetry against rounding of the two sweeps
    for i in 0..n {
        for j in (i + 1)..n {
            let s = 0.5 * (b[i * n + j] + b[j * n + i]);
            b[i * n + j] = s;
            b[j * n + i] = s;
        }
    }

    let mut vals = jacobi_eigenvalues(&mut b, n);
    vals.sort_by(f64::total_cmp);
    Ok(vals)
}

/// Dense lower Cholesky; errors signal a mass matrix that is not positive
/// definite, i.e. an assembly bug.
fn dense_cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= l[j * n + k] * l[j * n + k];
        }
        if !(s > 0.0) {
            return Err(SpectralError::FactorizationFailed(format!(
                "mass matrix is not positive definite (pivot {s:e} at {j})"
            )));
        }
        let d = s.sqrt();
        l[j * n + j] = d;
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Ok(l)
}

fn forward_column(l: &[f64], n: usize, m: &mut [f64], col: usize) {
    for i in 0..n {
        let mut s = m[i * n + col];
        for k in 0..i {
            s -= l[i * n + k] * m[k * n + col];
        }
        m[i * n + col] = s / l[i * n + i];
    }
}

fn forward_vec(l: &[f64], n: usize, v: &mut [f64]) {
    for i in 0..n {
        let mut s = v[i];
        for k in 0..i {
            s -= l[i * n + k] * v[k];
        }
        v[i] = s / l[i * n + i];
    }
}

/// Eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations
/// (values only; the matrix is destroyed).
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a[0]];
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    let mut b = d.clone();
    let mut z = vec![0.0; n];

    for sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                off += a[p * n + q].abs();
            }
        }
        if off == 0.0 {
            return d;
        }
        let thresh = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let g = 100.0 * a[p * n + q].abs();
                if sweep > 3
                    && d[p].abs() + g == d[p].abs()
                    && d[q].abs() + g == d[q].abs()
                {
                    a[p * n + q] = 0.0;
                } else if a[p * n + q].abs() > thresh {
                    let mut h = d[q] - d[p];
                    let t = if h.abs() + g == h.abs() {
                        a[p * n + q] / h
                    } else {
                        let theta = 0.5 * h / a[p * n + q];
                        let mut t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
                        if theta < 0.0 {
                            t = -t;
                        }
                        t
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    let tau = s / (1.0 + c);
                    h = t * a[p * n + q];
                    z[p] -= h;
                    z[q] += h;
                    d[p] -= h;
                    d[q] += h;
                    a[p * n + q] = 0.0;
                    let rotate = |a: &mut [f64], i: usize, j: usize, k: usize, l: usize| {
                        let g = a[i * n + j];
                        let h = a[k * n + l];
                        a[i * n + j] = g - s * (h + g * tau);
                        a[k * n + l] = h + s * (g - h * tau);
                    };
                    for j in 0..p {
                        rotate(a, j, p, j, q);
                    }
                    for j in (p + 1)..q {
                        rotate(a, p, j, j, q);
                    }
                    for j in (q + 1)..n {
                        rotate(a, p, j, q, j);
                    }
                }
            }
        }
        for i in 0..n {
            b[i] += z[i];
            d[i] = b[i];
            z[i] = 0.0;
        }
    }
    d
}

/// Eigen decomposition of a symmetric tridiagonal matrix by the implicit QL
/// algorithm with Wilkinson shifts. Returns ascending eigenvalues and the
/// matching eigenvector matrix (column i at z[j*m + i]).
pub(crate) fn tridiag_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = diag.len();
    assert!(off.len() + 1 == m || m == 0);
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    e[..m - 1].copy_from_slice(off);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }

    for l in 0..m {
        let mut iter = 0;
        loop {
            // split point: negligible off-diagonal
            let mut split = m - 1;
            for mm in l..m - 1 {
                let dd = d[mm].abs() + d[mm + 1].abs();
                if e[mm].abs() <= f64::EPSILON * dd {
                    split = mm;
                    break;
                }
            }
            if split == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[split] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..split).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[split] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..m {
                    f = z[k * m + i + 1];
                    z[k * m + i + 1] = s * z[k * m + i] + c * f;
                    z[k * m + i] = c * z[k * m + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[split] = 0.0;
        }
    }

    // sort ascending, permuting columns alongside
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let sorted_d: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut sorted_z = vec![0.0; m * m];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..m {
            sorted_z[row * m + new_col] = z[row * m + old_col];
        }
    }
    (sorted_d, sorted_z)
}
