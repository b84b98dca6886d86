//! Seeded generators for random states and unitaries used by the test
//! harness, the adversarial search, and the CLI.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::Config;
use crate::error::Result;
use crate::linalg;
use crate::state::{LocalUnitary, PureState, Side};

/// The crate-wide deterministic RNG.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Haar-random state: normalized complex Gaussian amplitudes.
pub fn random_state<R: Rng>(dims: &[usize], rng: &mut R, config: &Config) -> Result<PureState> {
    let total: usize = dims.iter().product();
    let mut amps: Vec<C64> = (0..total)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    PureState::new(dims.to_vec(), amps, None, None, config)
}

/// Haar-random unitary acting on one side.
pub fn random_local_unitary<R: Rng>(side: Side, d: usize, rng: &mut R) -> LocalUnitary {
    LocalUnitary::new(side, linalg::haar_unitary(d, rng))
}

/// Random bipartite state with a prescribed Schmidt coefficient multiplicity
/// pattern: `block_sizes[b]` branches share one coefficient per block, blocks
/// separated by more than 10·tol_spec, bases Haar-random.
pub fn random_equal_block_state<R: Rng>(
    ds: usize,
    de: usize,
    block_sizes: &[usize],
    rng: &mut R,
    config: &Config,
) -> Result<PureState> {
    let r: usize = block_sizes.iter().sum();
    assert!(r >= 1 && r <= ds.min(de), "rank must fit both sides");

    // Distinct squared weights per block, well separated after normalization.
    let mut weights: Vec<f64>;
    loop {
        weights = (0..block_sizes.len())
            .map(|_| rng.gen_range(0.2..1.0))
            .collect();
        let total: f64 = block_sizes
            .iter()
            .zip(&weights)
            .map(|(m, w)| *m as f64 * w)
            .sum();
        for w in &mut weights {
            *w /= total;
        }
        let mut coeffs: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
        coeffs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let separated = coeffs
            .windows(2)
            .all(|w| (w[0] - w[1]).abs() > 20.0 * config.tol_spec);
        if separated {
            break;
        }
    }

    let us = linalg::haar_unitary(ds, rng);
    let ue = linalg::haar_unitary(de, rng);

    let mut mat = Array2::from_elem((ds, de), C64::new(0.0, 0.0));
    let mut k = 0;
    for (b, size) in block_sizes.iter().enumerate() {
        let alpha = weights[b].sqrt();
        for _ in 0..*size {
            for i in 0..ds {
                for j in 0..de {
                    mat[(i, j)] += C64::new(alpha, 0.0) * us[(i, k)] * ue[(j, k)];
                }
            }
            k += 1;
        }
    }
    let amps: Vec<C64> = mat.iter().cloned().collect();
    // Renormalize away the tiny float drift from the basis products.
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amps: Vec<C64> = amps.into_iter().map(|z| z / norm).collect();
    PureState::new(vec![ds, de], amps, None, None, config)
}

/// A u_S under which a random state is envariant by construction: a random
/// phase rotation in the Schmidt basis plus Haar blocks on degenerate
/// subspaces.
pub fn constructed_envariant_unitary<R: Rng>(
    state: &PureState,
    rng: &mut R,
    config: &Config,
) -> Result<LocalUnitary> {
    let form = crate::schmidt::schmidt_decompose(state, config)?;
    let ds = state.dims()[0];
    let mut u = linalg::identity(ds);
    // u = Σ_blocks σ_block · g_block · σ_block† + (1 − P_support)
    for block in form.blocks(config.tol_spec) {
        let m = block.len();
        let g = if m == 1 {
            let phase = C64::new(0.0, rng.gen_range(-3.0..3.0)).exp();
            Array2::from_shape_fn((1, 1), |_| phase)
        } else {
            linalg::haar_unitary(m, rng)
        };
        for i in 0..ds {
            for j in 0..ds {
                let mut acc = C64::new(0.0, 0.0);
                for a in 0..m {
                    for b in 0..m {
                        acc += form.basis_s[(i, block.start + a)]
                            * g[(a, b)]
                            * form.basis_s[(j, block.start + b)].conj();
                    }
                }
                u[(i, j)] += acc;
            }
        }
        for i in 0..ds {
            for j in 0..ds {
                let mut p = C64::new(0.0, 0.0);
                for a in 0..m {
                    p += form.basis_s[(i, block.start + a)]
                        * form.basis_s[(j, block.start + a)].conj();
                }
                u[(i, j)] -= p;
            }
        }
    }
    Ok(LocalUnitary::new(Side::S, u))
}
