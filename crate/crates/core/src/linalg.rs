//! Dense complex linear algebra for small matrices (d ≲ 100).
//!
//! Everything here is deterministic: Jacobi iterations with a fixed sweep
//! order, no threading, no vendored BLAS. Accuracy is far below the crate's
//! 1e-9 tolerances at the dimensions in play.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

const JACOBI_EPS: f64 = 1e-30;
const MAX_SWEEPS: usize = 64;

/// Conjugate transpose.
pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Complex identity.
pub fn identity(d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |(i, j)| {
        if i == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// max_ij |a_ij − b_ij|
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// ‖u†u − 1‖_max — zero for a unitary.
pub fn unitary_deviation(u: &Array2<C64>) -> f64 {
    let d = u.nrows();
    if d != u.ncols() {
        return f64::INFINITY;
    }
    max_abs_diff(&dagger(u).dot(u), &identity(d))
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi.
///
/// Returns eigenvalues in descending order with matching eigenvector columns;
/// `a = v · diag(vals) · v†` up to roundoff.
pub fn hermitian_eig(a: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let (vals, vecs) = jacobi_hermitian(a, true);
    (vals, vecs.expect("vectors requested"))
}

/// Eigenvalues only (descending); skips eigenvector accumulation.
pub fn hermitian_eigvals(a: &Array2<C64>) -> Vec<f64> {
    jacobi_hermitian(a, false).0
}

fn jacobi_hermitian(a: &Array2<C64>, want_vectors: bool) -> (Vec<f64>, Option<Array2<C64>>) {
    let d = a.nrows();
    assert_eq!(d, a.ncols(), "hermitian_eig needs a square matrix");
    let mut m = a.clone();
    let mut v = want_vectors.then(|| identity(d));

    let scale: f64 = m.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = offdiag_sqr(&m);
        if off <= JACOBI_EPS * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[(p, q)];
                let mag = apq.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase-rotate (p,q) to a real pivot, then a real rotation.
                let phase = apq.conj() / mag;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // G = diag(1, phase) · R(c, s) restricted to the (p,q) plane.
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -C64::new(s, 0.0) * phase;
                let gqq = C64::new(c, 0.0) * phase;

                // m ← m · G on columns p,q
                for i in 0..d {
                    let mip = m[(i, p)];
                    let miq = m[(i, q)];
                    m[(i, p)] = mip * gpp + miq * gqp;
                    m[(i, q)] = mip * gpq + miq * gqq;
                }
                // m ← G† · m on rows p,q
                for j in 0..d {
                    let mpj = m[(p, j)];
                    let mqj = m[(q, j)];
                    m[(p, j)] = gpp.conj() * mpj + gqp.conj() * mqj;
                    m[(q, j)] = gpq.conj() * mpj + gqq.conj() * mqj;
                }
                if let Some(v) = v.as_mut() {
                    for i in 0..d {
                        let vip = v[(i, p)];
                        let viq = v[(i, q)];
                        v[(i, p)] = vip * gpp + viq * gqp;
                        v[(i, q)] = vip * gpq + viq * gqq;
                    }
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let diag: Vec<f64> = (0..d).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap().then(i.cmp(&j)));

    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = v.map(|v| {
        let mut out = Array2::zeros((d, d));
        for (new, &old) in order.iter().enumerate() {
            for i in 0..d {
                out[(i, new)] = v[(i, old)];
            }
        }
        out
    });
    (vals, vecs)
}

fn offdiag_sqr(m: &Array2<C64>) -> f64 {
    let d = m.nrows();
    let mut s = 0.0;
    for p in 0..d {
        for q in 0..d {
            if p != q {
                s += m[(p, q)].norm_sqr();
            }
        }
    }
    s
}

/// Thin SVD `a = u · diag(sigma) · v†` by one-sided Jacobi on columns.
///
/// `u` is m×k, `v` is n×k with k = min(m, n); singular values descending.
/// Columns of `u` belonging to (numerically) zero singular values are filled
/// by deterministic completion so `u` always has orthonormal columns.
pub fn svd(a: &Array2<C64>) -> (Array2<C64>, Vec<f64>, Array2<C64>) {
    let m = a.nrows();
    let n = a.ncols();
    let mut w = a.clone();
    let mut v = identity(n);

    let scale: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut hpp = 0.0;
                let mut hqq = 0.0;
                let mut hpq = C64::new(0.0, 0.0);
                for i in 0..m {
                    hpp += w[(i, p)].norm_sqr();
                    hqq += w[(i, q)].norm_sqr();
                    hpq += w[(i, p)].conj() * w[(i, q)];
                }
                if hpq.norm_sqr() <= JACOBI_EPS * (hpp * hqq).max(JACOBI_EPS * scale * scale) {
                    continue;
                }
                rotated = true;
                let mag = hpq.norm();
                let phase = hpq.conj() / mag;
                let tau = (hqq - hpp) / (2.0 * mag);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = -C64::new(s, 0.0) * phase;
                let gqq = C64::new(c, 0.0) * phase;
                for i in 0..m {
                    let wip = w[(i, p)];
                    let wiq = w[(i, q)];
                    w[(i, p)] = wip * gpp + wiq * gqp;
                    w[(i, q)] = wip * gpq + wiq * gqq;
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * gpp + viq * gqp;
                    v[(i, q)] = vip * gpq + viq * gqq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let k = m.min(n);
    let mut norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap().then(i.cmp(&j)));
    order.truncate(k);
    norms = order.iter().map(|&j| norms[j]).collect();

    let mut u = Array2::zeros((m, k));
    let mut vk = Array2::zeros((n, k));
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            vk[(i, new)] = v[(i, old)];
        }
        if norms[new] > 1e-150 {
            for i in 0..m {
                u[(i, new)] = w[(i, old)] / norms[new];
            }
        }
    }
    // Fill columns for vanished singular values.
    complete_orthonormal(&mut u, norms.iter().filter(|&&s| s > 1e-150).count());
    (u, norms, vk)
}

/// Replace columns `filled..` of `q` (orthonormal up to `filled`) with a
/// deterministic orthonormal completion built from computational vectors in
/// ascending index order.
pub fn complete_orthonormal(q: &mut Array2<C64>, filled: usize) {
    let d = q.nrows();
    let want = q.ncols();
    let mut have = filled;
    let mut cand = 0;
    while have < want && cand < d {
        let mut v = Array1::from_elem(d, C64::new(0.0, 0.0));
        v[cand] = C64::new(1.0, 0.0);
        // Two Gram-Schmidt passes for orthogonality at full precision.
        for _ in 0..2 {
            for j in 0..have {
                let mut ip = C64::new(0.0, 0.0);
                for i in 0..d {
                    ip += q[(i, j)].conj() * v[i];
                }
                for i in 0..d {
                    v[i] -= ip * q[(i, j)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for i in 0..d {
                q[(i, have)] = v[i] / norm;
            }
            have += 1;
        }
        cand += 1;
    }
    assert!(have == want, "orthonormal completion ran out of candidates");
}

/// Canonical orthonormal basis of the span of the orthonormal columns `w`.
///
/// Projects computational vectors onto the span in ascending index order and
/// keeps (after Gram-Schmidt) those with residual norm above a pivot
/// threshold. The result depends only on the subspace, not on the basis used
/// to present it, which makes degenerate-block output reproducible.
pub fn canonical_span_basis(w: &Array2<C64>) -> Array2<C64> {
    let d = w.nrows();
    let m = w.ncols();
    let mut out = Array2::zeros((d, m));
    let mut have = 0;
    for cand in 0..d {
        if have == m {
            break;
        }
        // v = P e_cand with P = w w†
        let coeffs: Vec<C64> = (0..m).map(|j| w[(cand, j)].conj()).collect();
        let mut v = Array1::from_elem(d, C64::new(0.0, 0.0));
        for j in 0..m {
            for i in 0..d {
                v[i] += w[(i, j)] * coeffs[j];
            }
        }
        for _ in 0..2 {
            for j in 0..have {
                let mut ip = C64::new(0.0, 0.0);
                for i in 0..d {
                    ip += out[(i, j)].conj() * v[i];
                }
                for i in 0..d {
                    v[i] -= ip * out[(i, j)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for i in 0..d {
                out[(i, have)] = v[i] / norm;
            }
            have += 1;
        }
    }
    assert!(have == m, "degenerate block span lost rank during canonicalization");
    out
}

/// Haar-distributed random unitary.
///
/// Modified Gram-Schmidt on a complex Gaussian matrix. Forcing the implicit
/// R-diagonal real positive fixes the column phases, which is exactly the
/// normalization that makes the factor Haar rather than merely unitary.
pub fn haar_unitary<R: Rng>(d: usize, rng: &mut R) -> Array2<C64> {
    let mut q = Array2::from_shape_fn((d, d), |_| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    for j in 0..d {
        for k in 0..j {
            let mut ip = C64::new(0.0, 0.0);
            for i in 0..d {
                ip += q[(i, k)].conj() * q[(i, j)];
            }
            for i in 0..d {
                let qik = q[(i, k)];
                q[(i, j)] -= ip * qik;
            }
        }
        let norm = (0..d).map(|i| q[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for i in 0..d {
                q[(i, j)] /= norm;
            }
        }
    }
    q
}

/// exp(i·h) for Hermitian h, via eigendecomposition (exactly unitary up to
/// the eigensolver's numerics).
pub fn expm_i_hermitian(h: &Array2<C64>) -> Array2<C64> {
    let d = h.nrows();
    let (vals, vecs) = hermitian_eig(h);
    let mut out = Array2::zeros((d, d));
    for k in 0..d {
        let ph = C64::new(0.0, vals[k]).exp();
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += vecs[(i, k)] * ph * vecs[(j, k)].conj();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(d: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let z = Array2::from_shape_fn((d, d), |_| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        (&z + &dagger(&z)).mapv(|v| v * 0.5)
    }

    #[test]
    fn hermitian_eig_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [1usize, 2, 3, 5, 8, 13] {
            let h = random_hermitian(d, &mut rng);
            let (vals, vecs) = hermitian_eig(&h);
            assert!(unitary_deviation(&vecs) < 1e-12);
            let mut rec = Array2::<C64>::zeros((d, d));
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        rec[(i, j)] += vecs[(i, k)] * C64::new(vals[k], 0.0) * vecs[(j, k)].conj();
                    }
                }
            }
            assert!(max_abs_diff(&rec, &h) < 1e-11, "d={d}");
            for w in vals.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
        }
    }

    #[test]
    fn eigvals_match_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(6, &mut rng);
        let vals = hermitian_eigvals(&h);
        let tr: f64 = (0..6).map(|i| h[(i, i)].re).sum();
        assert!((vals.iter().sum::<f64>() - tr).abs() < 1e-11);
    }

    #[test]
    fn svd_reconstructs_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (m, n) in [(3usize, 3usize), (2, 5), (5, 2), (4, 4), (6, 6)] {
            let a = Array2::from_shape_fn((m, n), |_| {
                C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            });
            let (u, s, v) = svd(&a);
            let k = m.min(n);
            let mut rec = Array2::<C64>::zeros((m, n));
            for t in 0..k {
                for i in 0..m {
                    for j in 0..n {
                        rec[(i, j)] += u[(i, t)] * C64::new(s[t], 0.0) * v[(j, t)].conj();
                    }
                }
            }
            assert!(max_abs_diff(&rec, &a) < 1e-11, "({m},{n})");
            assert!(max_abs_diff(&dagger(&u).dot(&u), &identity(k)) < 1e-12);
            assert!(max_abs_diff(&dagger(&v).dot(&v), &identity(k)) < 1e-12);
        }
    }

    #[test]
    fn svd_handles_rank_deficiency() {
        // Rank-1 3x3 matrix.
        let col = [C64::new(1.0, 0.5), C64::new(0.0, -1.0), C64::new(2.0, 0.0)];
        let row = [C64::new(0.5, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 1.0)];
        let a = Array2::from_shape_fn((3, 3), |(i, j)| col[i] * row[j]);
        let (u, s, _v) = svd(&a);
        assert!(s[0] > 1.0);
        assert!(s[1] < 1e-12 && s[2] < 1e-12);
        assert!(unitary_deviation(&u) < 1e-10);
    }

    #[test]
    fn haar_unitary_is_unitary_and_seeded() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let u1 = haar_unitary(5, &mut rng);
        assert!(unitary_deviation(&u1) < 1e-12);
        let mut rng2 = ChaCha8Rng::seed_from_u64(42);
        let u2 = haar_unitary(5, &mut rng2);
        assert_eq!(u1, u2);
    }

    #[test]
    fn expm_of_hermitian_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let h = random_hermitian(4, &mut rng);
        let u = expm_i_hermitian(&h);
        assert!(unitary_deviation(&u) < 1e-12);
        // exp(i·0) = 1
        let z = Array2::from_elem((3, 3), C64::new(0.0, 0.0));
        assert!(max_abs_diff(&expm_i_hermitian(&z), &identity(3)) < 1e-15);
    }

    #[test]
    fn canonical_span_basis_is_basis_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // Random 2-dim subspace of C^4 presented in two different bases.
        let u = haar_unitary(4, &mut rng);
        let w1 = u.slice(ndarray::s![.., 0..2]).to_owned();
        // Mix the two columns by a random 2x2 unitary.
        let g = haar_unitary(2, &mut rng);
        let mut w2 = Array2::zeros((4, 2));
        for i in 0..4 {
            for j in 0..2 {
                for k in 0..2 {
                    w2[(i, j)] += w1[(i, k)] * g[(k, j)];
                }
            }
        }
        let b1 = canonical_span_basis(&w1);
        let b2 = canonical_span_basis(&w2);
        assert!(max_abs_diff(&b1, &b2) < 1e-10);
    }
}
