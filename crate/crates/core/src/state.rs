//! States, local unitaries, and reduced density matrices over small
//! multipartite Hilbert spaces.
//!
//! Amplitudes are stored subsystem-major: the first subsystem's index is the
//! slowest. A bipartite state with dims [dS, dE] therefore reshapes to a
//! dS×dE matrix row-by-row, which is the layout every decomposition here
//! relies on. States are immutable after construction and all operations are
//! pure functions, so values can be shared freely across threads.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::exact::{sqrt_rational, ExactAmplitudes, Rat};

/// Which subsystem a local action targets. `S` and `E` are the two protocol
/// parties; `C` is the ancilla attached by fine-graining.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    S,
    E,
    C,
}

impl Side {
    pub fn axis(self) -> usize {
        match self {
            Side::S => 0,
            Side::E => 1,
            Side::C => 2,
        }
    }

    /// The opposite protocol party (S↔E); the ancilla has no opposite.
    pub fn opposite(self) -> Option<Side> {
        match self {
            Side::S => Some(Side::E),
            Side::E => Some(Side::S),
            Side::C => None,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Side::S => write!(f, "S"),
            Side::E => write!(f, "E"),
            Side::C => write!(f, "C"),
        }
    }
}

/// Normalized pure state of 2 or 3 labelled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amps: Vec<C64>,
    label: Option<String>,
    exact: Option<ExactAmplitudes>,
}

impl PureState {
    /// Validating constructor. `exact`, when present, must describe the same
    /// amplitudes as the float data.
    pub fn new(
        dims: Vec<usize>,
        amps: Vec<C64>,
        label: Option<String>,
        exact: Option<ExactAmplitudes>,
        config: &Config,
    ) -> Result<Self> {
        if dims.len() < 2 || dims.len() > 3 {
            return Err(Error::SubsystemCount {
                expected: 2,
                got: dims.len(),
            });
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::DimensionMismatch("subsystem dimension 0".into()));
        }
        let total: usize = dims.iter().product();
        if total > config.dim_cap {
            return Err(Error::DimensionCap {
                dim: total,
                cap: config.dim_cap,
            });
        }
        if amps.len() != total {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for total dimension {total}",
                amps.len()
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        let deficit = (norm_sqr - 1.0).abs();
        if deficit > config.tol_norm {
            return Err(Error::NotNormalized {
                deficit,
                tol: config.tol_norm,
            });
        }
        if let Some(ex) = &exact {
            if ex.len() != total {
                return Err(Error::ExactRequired(format!(
                    "annotation covers {} entries, state has {total}",
                    ex.len()
                )));
            }
            for (i, amp) in amps.iter().enumerate() {
                let v = ex.value(i);
                if (amp - C64::new(v, 0.0)).norm() > config.tol_state {
                    return Err(Error::ExactRequired(format!(
                        "annotation disagrees with amplitude {i}: {amp} vs {v}"
                    )));
                }
            }
        }
        Ok(Self {
            dims,
            amps,
            label,
            exact,
        })
    }

    /// Rank-n maximally entangled bipartite state Σ_k |kk⟩/√n, exact.
    pub fn maximally_entangled(n: usize, label: Option<String>, config: &Config) -> Result<Self> {
        let mut amps = vec![C64::new(0.0, 0.0); n * n];
        let mut num = vec![0u64; n * n];
        let v = (1.0 / n as f64).sqrt();
        for k in 0..n {
            amps[k * n + k] = C64::new(v, 0.0);
            num[k * n + k] = 1;
        }
        let exact = ExactAmplitudes::from_squares(num, n as u64, vec![1; n * n])?;
        Self::new(vec![n, n], amps, label, Some(exact), config)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn exact(&self) -> Option<&ExactAmplitudes> {
        self.exact.as_ref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn total_dim(&self) -> usize {
        self.amps.len()
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn is_bipartite(&self) -> bool {
        self.dims.len() == 2
    }

    /// Dimension of one subsystem; errors if the state has no such factor.
    pub fn side_dim(&self, side: Side) -> Result<usize> {
        let ax = side.axis();
        self.dims
            .get(ax)
            .copied()
            .ok_or(Error::UnknownSubsystem(side))
    }

    /// (stride, blocks) pair for iterating one axis: flat index =
    /// `outer * dim * stride + k * stride + inner`.
    fn axis_layout(&self, axis: usize) -> (usize, usize) {
        let stride: usize = self.dims[axis + 1..].iter().product();
        let outer: usize = self.dims[..axis].iter().product();
        (stride, outer)
    }

    /// Bipartite view of the amplitudes as a dS×dE matrix.
    pub fn as_matrix(&self) -> Result<Array2<C64>> {
        if !self.is_bipartite() {
            return Err(Error::SubsystemCount {
                expected: 2,
                got: self.dims.len(),
            });
        }
        Ok(Array2::from_shape_vec(
            (self.dims[0], self.dims[1]),
            self.amps.clone(),
        )
        .expect("length checked at construction"))
    }

    /// Apply a unitary on one subsystem; all other indices untouched.
    ///
    /// Exact annotations survive when the matrix is a signed permutation
    /// (the only exact-representable unitaries); otherwise the result is
    /// numeric only.
    pub fn apply_local(&self, u: &LocalUnitary) -> Result<PureState> {
        let d = self.side_dim(u.side)?;
        if u.matrix.nrows() != d || u.matrix.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "unitary is {}×{}, subsystem {} has dimension {d}",
                u.matrix.nrows(),
                u.matrix.ncols(),
                u.side
            )));
        }
        let axis = u.side.axis();
        let (stride, outer) = self.axis_layout(axis);
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut col = vec![C64::new(0.0, 0.0); d];
        for b in 0..outer {
            let block = b * d * stride;
            for inner in 0..stride {
                for k in 0..d {
                    col[k] = self.amps[block + k * stride + inner];
                }
                for i in 0..d {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..d {
                        acc += u.matrix[(i, k)] * col[k];
                    }
                    out[block + i * stride + inner] = acc;
                }
            }
        }

        let exact = match (&self.exact, u.signed_permutation()) {
            (Some(ex), Some(perm)) => {
                let mut num = vec![0u64; ex.len()];
                let mut signs = vec![1i8; ex.len()];
                for b in 0..outer {
                    let block = b * d * stride;
                    for inner in 0..stride {
                        for k in 0..d {
                            let (row, sgn) = perm[k];
                            let src = block + k * stride + inner;
                            let dst = block + row * stride + inner;
                            num[dst] = ex.num[src];
                            signs[dst] = ex.signs[src] * sgn;
                        }
                    }
                }
                Some(ExactAmplitudes::from_squares(num, ex.den, signs)?)
            }
            _ => None,
        };

        Ok(PureState {
            dims: self.dims.clone(),
            amps: out,
            label: None,
            exact,
        })
    }

    /// Reduced density matrix of one subsystem (all others traced out).
    pub fn partial_trace(&self, keep: Side) -> Result<DensityMatrix> {
        let d = self.side_dim(keep)?;
        let axis = keep.axis();
        let (stride, outer) = self.axis_layout(axis);
        let mut rho = Array2::from_elem((d, d), C64::new(0.0, 0.0));
        for b in 0..outer {
            let block = b * d * stride;
            for inner in 0..stride {
                for a in 0..d {
                    let za = self.amps[block + a * stride + inner];
                    if za == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for bb in 0..d {
                        let zb = self.amps[block + bb * stride + inner];
                        rho[(a, bb)] += za * zb.conj();
                    }
                }
            }
        }
        Ok(DensityMatrix { matrix: rho })
    }

    /// Exact reduced density matrix; `None` when an entry falls outside the
    /// rational ring (amplitude products with non-square ratios).
    pub fn partial_trace_exact(&self, keep: Side) -> Result<Option<Vec<Rat>>> {
        let Some(ex) = &self.exact else {
            return Ok(None);
        };
        let d = self.side_dim(keep)?;
        let axis = keep.axis();
        let (stride, outer) = self.axis_layout(axis);
        let mut rho = vec![Rat::from_integer(0); d * d];
        let den = ex.den as i64;
        for b in 0..outer {
            let block = b * d * stride;
            for inner in 0..stride {
                for a in 0..d {
                    let ia = block + a * stride + inner;
                    if ex.num[ia] == 0 {
                        continue;
                    }
                    for bb in 0..d {
                        let ib = block + bb * stride + inner;
                        if ex.num[ib] == 0 {
                            continue;
                        }
                        let prod = Rat::new((ex.num[ia] * ex.num[ib]) as i64, den * den);
                        let Some(root) = sqrt_rational(prod) else {
                            return Ok(None);
                        };
                        let sgn = Rat::from_integer((ex.signs[ia] * ex.signs[ib]) as i64);
                        rho[a * d + bb] += sgn * root;
                    }
                }
            }
        }
        Ok(Some(rho))
    }

    /// Born probability of computational outcome `k` on `side`: the marginal
    /// Σ |amplitude|² over all other indices. Oracle only — the derivation
    /// pipeline never consumes this.
    pub fn born_probability(&self, side: Side, k: usize) -> Result<f64> {
        let d = self.side_dim(side)?;
        if k >= d {
            return Err(Error::OutcomeRange { index: k, dim: d });
        }
        let axis = side.axis();
        let (stride, outer) = self.axis_layout(axis);
        let mut p = 0.0;
        for b in 0..outer {
            let block = b * d * stride + k * stride;
            for inner in 0..stride {
                p += self.amps[block + inner].norm_sqr();
            }
        }
        Ok(p)
    }

    /// Exact Born probability; available whenever the state is annotated.
    pub fn born_probability_exact(&self, side: Side, k: usize) -> Result<Option<Rat>> {
        let Some(ex) = &self.exact else {
            return Ok(None);
        };
        let d = self.side_dim(side)?;
        if k >= d {
            return Err(Error::OutcomeRange { index: k, dim: d });
        }
        let axis = side.axis();
        let (stride, outer) = self.axis_layout(axis);
        let mut num: u64 = 0;
        for b in 0..outer {
            let block = b * d * stride + k * stride;
            for inner in 0..stride {
                num += ex.num[block + inner];
            }
        }
        Ok(Some(Rat::new(num as i64, ex.den as i64)))
    }

    /// Born probability of projecting `side` onto the unit vector `v`.
    pub fn born_probability_vector(&self, side: Side, v: &Array1<C64>) -> Result<f64> {
        let d = self.side_dim(side)?;
        if v.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "vector length {} vs subsystem dimension {d}",
                v.len()
            )));
        }
        let axis = side.axis();
        let (stride, outer) = self.axis_layout(axis);
        let mut p = 0.0;
        for b in 0..outer {
            let block = b * d * stride;
            for inner in 0..stride {
                let mut amp = C64::new(0.0, 0.0);
                for k in 0..d {
                    amp += v[k].conj() * self.amps[block + k * stride + inner];
                }
                p += amp.norm_sqr();
            }
        }
        Ok(p)
    }

    /// Full outcome distribution on one side.
    pub fn born_distribution(&self, side: Side) -> Result<Vec<f64>> {
        let d = self.side_dim(side)?;
        (0..d).map(|k| self.born_probability(side, k)).collect()
    }
}

/// Result of comparing two states modulo global phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatch {
    pub equal: bool,
    /// Phase φ minimizing ‖a − e^{iφ} b‖.
    pub phase: f64,
    pub residual: f64,
}

/// Minimal-distance equality of states up to a global phase.
///
/// The minimizing phase is arg⟨b|a⟩ and the residual at that phase is
/// √(2 − 2|⟨b|a⟩|) for normalized inputs. When both states carry exact
/// annotations the comparison is done in integer arithmetic first and the
/// phase snaps to 0 or π.
pub fn states_equal_up_to_phase(a: &PureState, b: &PureState, tol: f64) -> Result<PhaseMatch> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    if let (Some(ea), Some(eb)) = (a.exact(), b.exact()) {
        if let Some(sign) = ea.equal_up_to_sign(eb) {
            return Ok(PhaseMatch {
                equal: true,
                phase: if sign == 1 { 0.0 } else { std::f64::consts::PI },
                residual: 0.0,
            });
        }
    }
    let mut overlap = C64::new(0.0, 0.0);
    for (x, y) in a.amps().iter().zip(b.amps()) {
        overlap += y.conj() * x;
    }
    let residual = (2.0 - 2.0 * overlap.norm()).max(0.0).sqrt();
    Ok(PhaseMatch {
        equal: residual < tol,
        phase: if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 },
        residual,
    })
}

/// A unitary acting on one named subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalUnitary {
    pub side: Side,
    pub matrix: Array2<C64>,
}

impl LocalUnitary {
    pub fn new(side: Side, matrix: Array2<C64>) -> Self {
        Self { side, matrix }
    }

    pub fn identity(side: Side, d: usize) -> Self {
        Self {
            side,
            matrix: crate::linalg::identity(d),
        }
    }

    /// Swap of two computational basis vectors.
    pub fn swap_indices(side: Side, d: usize, k: usize, l: usize) -> Self {
        let mut m = crate::linalg::identity(d);
        m[(k, k)] = C64::new(0.0, 0.0);
        m[(l, l)] = C64::new(0.0, 0.0);
        m[(k, l)] = C64::new(1.0, 0.0);
        m[(l, k)] = C64::new(1.0, 0.0);
        Self { side, matrix: m }
    }

    /// Swap of two orthonormal vectors, identity on their complement.
    pub fn swap_vectors(side: Side, v1: &Array1<C64>, v2: &Array1<C64>) -> Self {
        let d = v1.len();
        let mut m = crate::linalg::identity(d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] += v1[i] * v2[j].conj() + v2[i] * v1[j].conj()
                    - v1[i] * v1[j].conj()
                    - v2[i] * v2[j].conj();
            }
        }
        Self { side, matrix: m }
    }

    /// diag(e^{iθ_0}, …) in the computational basis.
    pub fn diagonal_phases(side: Side, phases: &[f64]) -> Self {
        let d = phases.len();
        let mut m = Array2::from_elem((d, d), C64::new(0.0, 0.0));
        for (k, th) in phases.iter().enumerate() {
            m[(k, k)] = C64::new(0.0, *th).exp();
        }
        Self { side, matrix: m }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// ‖u†u − 1‖_max.
    pub fn deviation_from_unitary(&self) -> f64 {
        crate::linalg::unitary_deviation(&self.matrix)
    }

    /// `Some(perm)` when the matrix is a signed permutation to machine
    /// precision; `perm[j] = (i, s)` means column j maps e_j to s·e_i.
    pub fn signed_permutation(&self) -> Option<Vec<(usize, i8)>> {
        let d = self.dim();
        if self.matrix.ncols() != d {
            return None;
        }
        let mut perm = Vec::with_capacity(d);
        let mut used = vec![false; d];
        for j in 0..d {
            let mut hit: Option<(usize, i8)> = None;
            for i in 0..d {
                let z = self.matrix[(i, j)];
                if z.norm() < 1e-14 {
                    continue;
                }
                let sign = if (z - C64::new(1.0, 0.0)).norm() < 1e-12 {
                    1i8
                } else if (z + C64::new(1.0, 0.0)).norm() < 1e-12 {
                    -1i8
                } else {
                    return None;
                };
                if hit.is_some() {
                    return None;
                }
                hit = Some((i, sign));
            }
            let (i, s) = hit?;
            if used[i] {
                return None;
            }
            used[i] = true;
            perm.push((i, s));
        }
        Some(perm)
    }
}

/// Hermitian, unit-trace, positive-semidefinite matrix (up to tolerances).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: Array2<C64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Check the type invariants; returns the worst violation found.
    pub fn validate(&self, config: &Config) -> Result<()> {
        let d = self.dim();
        if self.matrix.ncols() != d {
            return Err(Error::DimensionMismatch("density matrix not square".into()));
        }
        let herm = crate::linalg::max_abs_diff(&self.matrix, &crate::linalg::dagger(&self.matrix));
        if herm > config.tol_state {
            return Err(Error::InvalidInput(format!(
                "density matrix not Hermitian: deviation {herm:.3e}"
            )));
        }
        let tr: C64 = (0..d).map(|i| self.matrix[(i, i)]).sum();
        if (tr - C64::new(1.0, 0.0)).norm() > config.tol_norm {
            return Err(Error::InvalidInput(format!("trace {} ≠ 1", tr)));
        }
        let evs = crate::linalg::hermitian_eigvals(&self.matrix);
        if let Some(min) = evs.last() {
            if *min < -config.tol_state {
                return Err(Error::InvalidInput(format!(
                    "negative eigenvalue {min:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// ½·Σ|λ_i(a − b)|: the trace distance between density matrices.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "{} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    let diff = &a.matrix - &b.matrix;
    let evs = crate::linalg::hermitian_eigvals(&diff);
    Ok(0.5 * evs.iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> Config {
        Config::default()
    }

    fn bell(config: &Config) -> PureState {
        PureState::maximally_entangled(2, Some("psi1".into()), config).unwrap()
    }

    #[test]
    fn construction_validates_norm_and_shape() {
        let c = cfg();
        let bad = PureState::new(
            vec![2, 2],
            vec![C64::new(1.0, 0.0); 4],
            None,
            None,
            &c,
        );
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));
        let short = PureState::new(vec![2, 2], vec![C64::new(1.0, 0.0); 3], None, None, &c);
        assert!(matches!(short, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn swap_on_e_gives_psi2_and_swap_on_s_restores() {
        let c = cfg();
        let psi1 = bell(&c);
        let psi2 = psi1
            .apply_local(&LocalUnitary::swap_indices(Side::E, 2, 0, 1))
            .unwrap();
        // (|01⟩ + |10⟩)/√2
        let v = (0.5f64).sqrt();
        assert!((psi2.amps()[1] - C64::new(v, 0.0)).norm() < 1e-15);
        assert!((psi2.amps()[2] - C64::new(v, 0.0)).norm() < 1e-15);
        assert!(psi2.amps()[0].norm() < 1e-15 && psi2.amps()[3].norm() < 1e-15);

        let psi3 = psi2
            .apply_local(&LocalUnitary::swap_indices(Side::S, 2, 0, 1))
            .unwrap();
        // Entrywise identical to psi1, including the exact annotation.
        assert_eq!(psi3.amps(), psi1.amps());
        assert_eq!(psi3.exact(), psi1.exact());
    }

    #[test]
    fn identity_leaves_state_bitwise_unchanged() {
        let c = cfg();
        let psi = bell(&c);
        let out = psi.apply_local(&LocalUnitary::identity(Side::S, 2)).unwrap();
        assert_eq!(out.amps(), psi.amps());
    }

    #[test]
    fn apply_local_rejects_dimension_mismatch() {
        let c = cfg();
        let psi = bell(&c);
        let u = LocalUnitary::identity(Side::S, 3);
        assert!(matches!(
            psi.apply_local(&u),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let c = cfg();
        let rho = bell(&c).partial_trace(Side::S).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert!((rho.matrix[(i, j)] - C64::new(want, 0.0)).norm() < 1e-15);
            }
        }
        rho.validate(&c).unwrap();
    }

    #[test]
    fn partial_trace_of_product_state_is_projector() {
        let c = cfg();
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[0] = C64::new(1.0, 0.0);
        let psi = PureState::new(vec![2, 2], amps, None, None, &c).unwrap();
        let rho = psi.partial_trace(Side::S).unwrap();
        assert!((rho.matrix[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(rho.matrix[(1, 1)].norm() < 1e-15);
    }

    #[test]
    fn unknown_subsystem_is_reported() {
        let c = cfg();
        let psi = bell(&c);
        assert!(matches!(
            psi.partial_trace(Side::C),
            Err(Error::UnknownSubsystem(Side::C))
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let c = cfg();
        let rho = bell(&c).partial_trace(Side::S).unwrap();
        assert_eq!(trace_distance(&rho, &rho).unwrap(), 0.0);

        let p0 = DensityMatrix {
            matrix: Array2::from_shape_fn((2, 2), |(i, j)| {
                C64::new(if i == 0 && j == 0 { 1.0 } else { 0.0 }, 0.0)
            }),
        };
        let p1 = DensityMatrix {
            matrix: Array2::from_shape_fn((2, 2), |(i, j)| {
                C64::new(if i == 1 && j == 1 { 1.0 } else { 0.0 }, 0.0)
            }),
        };
        assert!((trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-14);

        let diag = DensityMatrix {
            matrix: Array2::from_shape_fn((2, 2), |(i, j)| {
                C64::new(
                    match (i, j) {
                        (0, 0) => 0.75,
                        (1, 1) => 0.25,
                        _ => 0.0,
                    },
                    0.0,
                )
            }),
        };
        assert!((trace_distance(&rho, &diag).unwrap() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn born_probability_examples() {
        let c = cfg();
        let psi1 = bell(&c);
        assert!((psi1.born_probability(Side::S, 0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(
            psi1.born_probability_exact(Side::S, 0).unwrap(),
            Some(Rat::new(1, 2))
        );

        let a = (1.0f64 / 3.0).sqrt();
        let b = (2.0f64 / 3.0).sqrt();
        let mut amps = vec![C64::new(0.0, 0.0); 4];
        amps[0] = C64::new(a, 0.0);
        amps[3] = C64::new(b, 0.0);
        let ex = ExactAmplitudes::from_squares(vec![1, 0, 0, 2], 3, vec![1; 4]).unwrap();
        let psi = PureState::new(vec![2, 2], amps, None, Some(ex), &c).unwrap();
        assert!((psi.born_probability(Side::S, 1).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(
            psi.born_probability_exact(Side::S, 1).unwrap(),
            Some(Rat::new(2, 3))
        );
        assert!(matches!(
            psi.born_probability(Side::S, 2),
            Err(Error::OutcomeRange { .. })
        ));
        let dist = psi.born_distribution(Side::E).unwrap();
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_equality_examples() {
        let c = cfg();
        let psi1 = bell(&c);
        let m = states_equal_up_to_phase(&psi1, &psi1, c.tol_state).unwrap();
        assert!(m.equal && m.phase == 0.0);

        let minus = PureState::new(
            vec![2, 2],
            psi1.amps().iter().map(|z| -z).collect(),
            None,
            None,
            &c,
        )
        .unwrap();
        let m = states_equal_up_to_phase(&psi1, &minus, c.tol_state).unwrap();
        assert!(m.equal);
        assert!((m.phase.abs() - std::f64::consts::PI).abs() < 1e-12);

        let psi2 = psi1
            .apply_local(&LocalUnitary::swap_indices(Side::E, 2, 0, 1))
            .unwrap();
        let m = states_equal_up_to_phase(&psi1, &psi2, c.tol_state).unwrap();
        assert!(!m.equal);
    }

    #[test]
    fn signed_permutation_detection() {
        let swap = LocalUnitary::swap_indices(Side::E, 3, 0, 2);
        let perm = swap.signed_permutation().unwrap();
        assert_eq!(perm, vec![(2, 1), (1, 1), (0, 1)]);
        let phases = LocalUnitary::diagonal_phases(Side::S, &[0.0, std::f64::consts::PI]);
        let perm = phases.signed_permutation().unwrap();
        assert_eq!(perm, vec![(0, 1), (1, -1)]);
        let hadamard_like = LocalUnitary::new(
            Side::S,
            Array2::from_shape_fn((2, 2), |(i, j)| {
                let v = (0.5f64).sqrt();
                C64::new(if (i, j) == (1, 1) { -v } else { v }, 0.0)
            }),
        );
        assert!(hadamard_like.signed_permutation().is_none());
    }
}
