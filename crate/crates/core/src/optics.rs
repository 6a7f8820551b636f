//! Phase-space optics: symplectic transforms, the waveplate relabeling,
//! vacuum embedding, the q-plate coupling and the OPO source.
//!
//! The q-plate couples `[L, m] ↔ [R, m + 2q]`. For a coupled pair `(u, v)`
//! and retardation δ, with `c = cos δ/2`, `s = sin δ/2`, the output modes are
//! `u' = c·u − i·s·v` and `v' = c·v − i·s·u`, i.e. on quadratures
//!
//! ```text
//! X_u' = c X_u + s Y_v      X_v' = c X_v + s Y_u
//! Y_u' = c Y_u − s X_v      Y_v' = c Y_v − s X_u
//! ```
//!
//! At δ = π/2 this is the inverse q-plate relation used to build the
//! four-mode covariance matrix. The block is `cos(δ/2)·I + sin(δ/2)·G` with
//! `G² = −I`, so `S(δ₁)S(δ₂) = S(δ₁ + δ₂)` exactly and `S(δ + 2π) = −S(δ)`.
//! [`QPlateSpec`] reduces δ modulo 2π; the resulting global sign is invisible
//! at the covariance level.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, max_abs_diff, symplectic_form};
use crate::mode::{ModeLabel, ModeRegister, Polarization};
use crate::state::{make_standard_form, GaussianState, StandardFormParams};
use crate::{SN, TRANSFORM_TOL};

/// A linear phase-space map `Σ ↦ S Σ Sᵀ` between two registers.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
    input: ModeRegister,
    output: ModeRegister,
    passive: bool,
}

impl SymplecticTransform {
    /// Checks `S Ω Sᵀ = Ω` to [`TRANSFORM_TOL`] and records whether `S` is
    /// also orthogonal (passive).
    pub fn new(matrix: DMatrix<f64>, input: ModeRegister, output: ModeRegister) -> Result<Self> {
        let m = input.len();
        if output.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: output.len(),
            });
        }
        if matrix.nrows() != 2 * m || matrix.ncols() != 2 * m {
            return Err(Error::DimensionMismatch {
                expected: 2 * m,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        let deviation = symplectic_deviation(&matrix);
        if deviation.is_nan() || deviation > TRANSFORM_TOL {
            return Err(Error::NonSymplectic { deviation });
        }
        let passive = orthogonality_deviation(&matrix) <= TRANSFORM_TOL;
        Ok(Self {
            matrix,
            input,
            output,
            passive,
        })
    }

    pub fn identity(register: ModeRegister) -> Self {
        let dim = 2 * register.len();
        Self {
            matrix: DMatrix::identity(dim, dim),
            output: register.clone(),
            input: register,
            passive: true,
        }
    }

    /// Phase shift `k ↦ e^{−iθ} k` on one mode.
    pub fn phase_rotation(register: ModeRegister, mode: usize, theta: f64) -> Result<Self> {
        let n = register.len();
        if mode >= n {
            return Err(Error::IndexOutOfRange {
                index: mode,
                len: n,
            });
        }
        let mut s = DMatrix::identity(2 * n, 2 * n);
        let (sin, cos) = theta.sin_cos();
        let (x, y) = (2 * mode, 2 * mode + 1);
        s[(x, x)] = cos;
        s[(x, y)] = sin;
        s[(y, x)] = -sin;
        s[(y, y)] = cos;
        Self::new(s, register.clone(), register)
    }

    /// Real beam splitter `i' = cos θ·i + sin θ·j`, `j' = −sin θ·i + cos θ·j`.
    pub fn beam_splitter(register: ModeRegister, i: usize, j: usize, theta: f64) -> Result<Self> {
        let n = register.len();
        for k in [i, j] {
            if k >= n {
                return Err(Error::IndexOutOfRange { index: k, len: n });
            }
        }
        if i == j {
            return Err(Error::DuplicateIndex(i));
        }
        let mut s = DMatrix::identity(2 * n, 2 * n);
        let (sin, cos) = theta.sin_cos();
        for q in 0..2 {
            let (a, b) = (2 * i + q, 2 * j + q);
            s[(a, a)] = cos;
            s[(a, b)] = sin;
            s[(b, a)] = -sin;
            s[(b, b)] = cos;
        }
        Self::new(s, register.clone(), register)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn input_register(&self) -> &ModeRegister {
        &self.input
    }

    pub fn output_register(&self) -> &ModeRegister {
        &self.output
    }

    pub fn is_passive(&self) -> bool {
        self.passive
    }

    pub fn symplectic_deviation(&self) -> f64 {
        symplectic_deviation(&self.matrix)
    }

    pub fn orthogonality_deviation(&self) -> f64 {
        orthogonality_deviation(&self.matrix)
    }

    /// `other ∘ self`: apply `self` first.
    pub fn then(&self, other: &SymplecticTransform) -> Result<Self> {
        if other.input != self.output {
            return Err(Error::RegisterMismatch {
                state: self.output.to_string(),
                transform: other.input.to_string(),
            });
        }
        Self::new(
            &other.matrix * &self.matrix,
            self.input.clone(),
            other.output.clone(),
        )
    }
}

fn symplectic_deviation(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    max_abs_diff(&(s * &omega * s.transpose()), &omega)
}

fn orthogonality_deviation(s: &DMatrix<f64>) -> f64 {
    max_abs_diff(
        &(s * s.transpose()),
        &DMatrix::identity(s.nrows(), s.nrows()),
    )
}

/// `Σ' = S Σ Sᵀ`, `mean' = S·mean`; the register becomes the output register.
pub fn apply(transform: &SymplecticTransform, state: &GaussianState) -> Result<GaussianState> {
    if state.register() != transform.input_register() {
        return Err(Error::RegisterMismatch {
            state: state.register().to_string(),
            transform: transform.input_register().to_string(),
        });
    }
    let s = transform.matrix();
    let cov = linalg::symmetrize(&(s * state.cov() * s.transpose()));
    let mean = s * state.mean();
    GaussianState::new(transform.output_register().clone(), mean, cov)
}

/// Moves every mode from the linear to the circular basis (H → L, V → R).
/// The covariance entries carry over unchanged.
pub fn quarter_waveplate_relabel(state: &GaussianState) -> Result<GaussianState> {
    let modes = state
        .register()
        .iter()
        .map(|m| match m.polarization {
            Polarization::H => Ok(m.with_polarization(Polarization::L)),
            Polarization::V => Ok(m.with_polarization(Polarization::R)),
            _ => Err(Error::BadPolarization(m.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(state.clone().with_register(ModeRegister::new(modes)?))
}

/// Appends one vacuum mode per label: `Σ ⊕ sn·I`, zero-padded mean.
pub fn embed_with_vacua(
    state: &GaussianState,
    vacuum_labels: &[ModeLabel],
) -> Result<GaussianState> {
    if vacuum_labels.is_empty() {
        return Ok(state.clone());
    }
    let n = state.num_modes();
    let total = n + vacuum_labels.len();
    let mut modes = state.register().modes().to_vec();
    for label in vacuum_labels {
        if modes.contains(label) {
            return Err(Error::DuplicateLabel(label.to_string()));
        }
        modes.push(label.clone());
    }
    let register = ModeRegister::new(modes)?;
    let mut cov = DMatrix::identity(2 * total, 2 * total) * SN;
    cov.view_mut((0, 0), (2 * n, 2 * n)).copy_from(state.cov());
    let mut mean = DVector::zeros(2 * total);
    mean.rows_mut(0, 2 * n).copy_from(state.mean());
    GaussianState::new(register, mean, cov)
}

/// Topological charge and retardation of a q-plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QPlateSpec {
    twice_q: i32,
    delta: f64,
}

impl QPlateSpec {
    /// `q` must be a nonzero half-integer. `delta` (radians) is reduced to
    /// `[0, 2π)`.
    pub fn new(q: f64, delta: f64) -> Result<Self> {
        let twice = 2.0 * q;
        if !twice.is_finite()
            || twice.round() != twice
            || twice == 0.0
            || twice.abs() > i32::MAX as f64
        {
            return Err(Error::InvalidParameter(format!(
                "q-plate charge q = {q} must be a nonzero half-integer"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "retardation δ = {delta} is not finite"
            )));
        }
        Ok(Self {
            twice_q: twice as i32,
            delta: delta.rem_euclid(TAU),
        })
    }

    /// q = 1/2 tuned to δ = π/2: a balanced coupler.
    pub fn balanced() -> Self {
        Self {
            twice_q: 1,
            delta: PI / 2.0,
        }
    }

    pub fn q(&self) -> f64 {
        f64::from(self.twice_q) / 2.0
    }

    /// OAM shift 2q applied to an L-polarized input.
    pub fn oam_shift(&self) -> i32 {
        self.twice_q
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Label `(polarization, oam)` the q-plate couples `label` to.
    pub fn partner_of(&self, label: &ModeLabel) -> Result<(Polarization, i32)> {
        match label.polarization {
            Polarization::L => Ok((Polarization::R, label.oam + self.twice_q)),
            Polarization::R => Ok((Polarization::L, label.oam - self.twice_q)),
            _ => Err(Error::NotCircular(label.to_string())),
        }
    }
}

fn partner_index(spec: &QPlateSpec, register: &ModeRegister, k: usize) -> Result<usize> {
    let label = &register.modes()[k];
    let (pol, oam) = spec.partner_of(label)?;
    let mut found = register
        .iter()
        .enumerate()
        .filter(|(_, m)| m.polarization == pol && m.oam == oam)
        .map(|(j, _)| j);
    let partner = format!("[{pol},{oam}]");
    let j = found.next().ok_or_else(|| Error::UnpairedMode {
        mode: label.to_string(),
        partner: partner.clone(),
    })?;
    if found.next().is_some() {
        return Err(Error::AmbiguousPairing {
            mode: label.to_string(),
            partner,
        });
    }
    Ok(j)
}

/// Coupled mode pairs `(first, partner)` in order of first appearance.
pub fn qplate_pairs(spec: &QPlateSpec, register: &ModeRegister) -> Result<Vec<(usize, usize)>> {
    for m in register {
        if !m.polarization.is_circular() {
            return Err(Error::NotCircular(m.to_string()));
        }
    }
    let mut paired = vec![false; register.len()];
    let mut pairs = Vec::new();
    for k in 0..register.len() {
        if paired[k] {
            continue;
        }
        let j = partner_index(spec, register, k)?;
        paired[k] = true;
        paired[j] = true;
        pairs.push((k, j));
    }
    Ok(pairs)
}

fn output_tags(first: &str, second: &str) -> (String, String) {
    if let Some(base) = first.strip_suffix('1') {
        if !base.is_empty() && second == format!("{base}2") {
            return (first.to_owned(), second.to_owned());
        }
    }
    (format!("{first}1"), format!("{first}2"))
}

/// The q-plate acting on `register`, built as a direct sum of 4×4 blocks
/// over the coupled pairs.
///
/// The output register lists each pair contiguously, in order of first
/// appearance of the pair in the input, and renames the pair `(t, ·)` to
/// `(t1, t2)`. A pair already tagged `(x1, x2)` keeps its tags, so repeated
/// q-plates compose on the same register.
pub fn qplate_transform(spec: &QPlateSpec, register: &ModeRegister) -> Result<SymplecticTransform> {
    let pairs = qplate_pairs(spec, register)?;
    let n = register.len();
    let (s, c) = (spec.delta / 2.0).sin_cos();
    let mut matrix = DMatrix::zeros(2 * n, 2 * n);
    let mut out_modes = Vec::with_capacity(n);
    for (p, &(u, v)) in pairs.iter().enumerate() {
        let (ou, ov) = (2 * p, 2 * p + 1);
        let (xu, yu, xv, yv) = (2 * u, 2 * u + 1, 2 * v, 2 * v + 1);
        // X_u' = c X_u + s Y_v, Y_u' = c Y_u − s X_v
        matrix[(2 * ou, xu)] = c;
        matrix[(2 * ou, yv)] = s;
        matrix[(2 * ou + 1, yu)] = c;
        matrix[(2 * ou + 1, xv)] = -s;
        // X_v' = c X_v + s Y_u, Y_v' = c Y_v − s X_u
        matrix[(2 * ov, xv)] = c;
        matrix[(2 * ov, yu)] = s;
        matrix[(2 * ov + 1, yv)] = c;
        matrix[(2 * ov + 1, xu)] = -s;

        let (mu, mv) = (&register.modes()[u], &register.modes()[v]);
        let (tu, tv) = output_tags(&mu.tag, &mv.tag);
        out_modes.push(mu.with_tag(tu));
        out_modes.push(mv.with_tag(tv));
    }
    SymplecticTransform::new(matrix, register.clone(), ModeRegister::new(out_modes)?)
}

/// Vacuum labels for every q-plate partner missing from `register`, tagged
/// `<tag>~`.
pub fn partner_vacua(spec: &QPlateSpec, register: &ModeRegister) -> Result<Vec<ModeLabel>> {
    let mut out: Vec<ModeLabel> = Vec::new();
    for m in register {
        let (pol, oam) = spec.partner_of(m)?;
        let present = register
            .iter()
            .chain(out.iter())
            .any(|o| o.polarization == pol && o.oam == oam);
        if !present {
            out.push(ModeLabel::new(format!("{}~", m.tag), pol, oam));
        }
    }
    Ok(out)
}

/// Full distribution pipeline on a linearly polarized state: waveplate,
/// vacuum embedding of the q-plate partners, then the q-plate.
pub fn distribute(state: &GaussianState, spec: &QPlateSpec) -> Result<GaussianState> {
    let circular = quarter_waveplate_relabel(state)?;
    let vacua = partner_vacua(spec, circular.register())?;
    let embedded = embed_with_vacua(&circular, &vacua)?;
    let transform = qplate_transform(spec, embedded.register())?;
    apply(&transform, &embedded)
}

/// Closed-form four-mode covariance matrix in register order
/// `(a1, a2, b1, b2)` after the balanced q-plate, written directly in terms
/// of the standard-form entries and the vacuum noise `sn`.
pub fn sigma4_closed_form(p: StandardFormParams, sn: f64) -> DMatrix<f64> {
    let StandardFormParams { a, b, c1, c2 } = p;
    #[rustfmt::skip]
    let entries = [
        a + sn, 0.0,    0.0,    sn - a, c1,     0.0,    0.0,    -c1,
        0.0,    a + sn, a - sn, 0.0,    0.0,    c2,     c2,     0.0,
        0.0,    a - sn, a + sn, 0.0,    0.0,    c2,     c2,     0.0,
        sn - a, 0.0,    0.0,    a + sn, -c1,    0.0,    0.0,    c1,
        c1,     0.0,    0.0,    -c1,    b + sn, 0.0,    0.0,    sn - b,
        0.0,    c2,     c2,     0.0,    0.0,    b + sn, b - sn, 0.0,
        0.0,    c2,     c2,     0.0,    0.0,    b - sn, b + sn, 0.0,
        -c1,    0.0,    0.0,    c1,     sn - b, 0.0,    0.0,    b + sn,
    ];
    DMatrix::from_row_slice(8, 8, &entries) * 0.5
}

/// Two-mode squeezed vacuum with squeezing `r`, seen through a channel of
/// uniform efficiency `eta`.
pub fn opo_source(r: f64, eta: f64) -> Result<GaussianState> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "squeezing r = {r} must be ≥ 0"
        )));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "efficiency η = {eta} must lie in (0, 1]"
        )));
    }
    let diag = SN * (eta * (2.0 * r).cosh() + 1.0 - eta);
    let corr = SN * eta * (2.0 * r).sinh();
    make_standard_form(StandardFormParams::new(diag, diag, corr, -corr))
}

/// Uniform loss on every mode: `Σ ↦ ηΣ + (1 − η)·sn·I`, `mean ↦ √η·mean`.
pub fn uniform_loss(state: &GaussianState, eta: f64) -> Result<GaussianState> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "efficiency η = {eta} must lie in (0, 1]"
        )));
    }
    let dim = 2 * state.num_modes();
    let cov = state.cov() * eta + DMatrix::identity(dim, dim) * ((1.0 - eta) * SN);
    GaussianState::new(state.register().clone(), state.mean() * eta.sqrt(), cov)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_1_SQRT_2;

    use super::*;
    use crate::linalg::max_abs;

    fn circular_pair(
        tag: &str,
        first: Polarization,
        oam: i32,
        partner: Polarization,
        partner_oam: i32,
    ) -> ModeRegister {
        ModeRegister::new(vec![
            ModeLabel::new(tag, first, oam),
            ModeLabel::new(format!("{tag}~"), partner, partner_oam),
        ])
        .unwrap()
    }

    #[test]
    fn balanced_block_matches_quadrature_relations() {
        let reg = circular_pair("a", Polarization::L, 0, Polarization::R, 1);
        let t = qplate_transform(&QPlateSpec::balanced(), &reg).unwrap();
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            1.0, 0.0, 0.0, 1.0,
            0.0, 1.0, -1.0, 0.0,
            0.0, 1.0, 1.0, 0.0,
            -1.0, 0.0, 0.0, 1.0,
        ]) * FRAC_1_SQRT_2;
        assert!(max_abs_diff(t.matrix(), &expected) < 1e-15);
        assert!(t.is_passive());
        assert_eq!(t.output_register().tags(), vec!["a1", "a2"]);
    }

    #[test]
    fn zero_retardation_is_identity() {
        let reg = circular_pair("b", Polarization::R, 0, Polarization::L, -1);
        let t = qplate_transform(&QPlateSpec::new(0.5, 0.0).unwrap(), &reg).unwrap();
        assert_eq!(t.matrix(), &DMatrix::identity(4, 4));
    }

    #[test]
    fn pairing_rule_follows_charge() {
        let spec = QPlateSpec::new(1.0, PI / 2.0).unwrap();
        let ok = circular_pair("a", Polarization::L, 3, Polarization::R, 5);
        assert!(qplate_transform(&spec, &ok).is_ok());
        let bad = circular_pair("a", Polarization::L, 3, Polarization::R, 4);
        assert!(matches!(
            qplate_transform(&spec, &bad),
            Err(Error::UnpairedMode { .. })
        ));

        let lin = ModeRegister::new(vec![ModeLabel::new("a", Polarization::H, 0)]).unwrap();
        assert!(matches!(
            qplate_transform(&spec, &lin),
            Err(Error::NotCircular(_))
        ));

        let ambiguous = ModeRegister::new(vec![
            ModeLabel::new("a", Polarization::L, 0),
            ModeLabel::new("x", Polarization::R, 2),
            ModeLabel::new("y", Polarization::R, 2),
        ])
        .unwrap();
        assert!(matches!(
            qplate_transform(&spec, &ambiguous),
            Err(Error::AmbiguousPairing { .. })
        ));
    }

    #[test]
    fn qplate_spec_validation() {
        assert!(QPlateSpec::new(0.0, 1.0).is_err());
        assert!(QPlateSpec::new(0.3, 1.0).is_err());
        assert!(QPlateSpec::new(0.5, f64::NAN).is_err());
        let s = QPlateSpec::new(-1.5, 3.0 * PI).unwrap();
        assert_eq!(s.oam_shift(), -3);
        assert!((s.delta() - PI).abs() < 1e-15);
    }

    #[test]
    fn waveplate_relabels_without_touching_moments() {
        let s = make_standard_form(StandardFormParams::experimental()).unwrap();
        let c = quarter_waveplate_relabel(&s).unwrap();
        assert_eq!(c.cov(), s.cov());
        let labels: Vec<String> = c.register().iter().map(|m| m.to_string()).collect();
        assert_eq!(labels, vec!["a[L,0]", "b[R,0]"]);
        assert!(matches!(
            quarter_waveplate_relabel(&c),
            Err(Error::BadPolarization(_))
        ));
    }

    #[test]
    fn embedding_appends_vacuum_blocks() {
        let s = quarter_waveplate_relabel(
            &make_standard_form(StandardFormParams::experimental()).unwrap(),
        )
        .unwrap();
        let labels = vec![
            ModeLabel::new("a~", Polarization::R, 1),
            ModeLabel::new("b~", Polarization::L, -1),
        ];
        assert_eq!(
            partner_vacua(&QPlateSpec::balanced(), s.register()).unwrap(),
            labels
        );
        let e = embed_with_vacua(&s, &labels).unwrap();
        assert_eq!(e.num_modes(), 4);
        assert_eq!(e.cov().view((0, 0), (4, 4)), s.cov().view((0, 0), (4, 4)));
        assert_eq!(
            e.cov().view((4, 4), (4, 4)).into_owned(),
            DMatrix::identity(4, 4) * SN
        );
        assert_eq!(max_abs(&e.cov().view((0, 4), (4, 4)).into_owned()), 0.0);

        assert_eq!(embed_with_vacua(&s, &[]).unwrap(), s);
        let dup = vec![s.register().modes()[0].clone()];
        assert!(matches!(
            embed_with_vacua(&s, &dup),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn distribute_reproduces_closed_form_at_experimental_point() {
        let p = StandardFormParams::experimental();
        let out = distribute(&make_standard_form(p).unwrap(), &QPlateSpec::balanced()).unwrap();
        assert_eq!(out.register().tags(), vec!["a1", "a2", "b1", "b2"]);
        let labels: Vec<String> = out.register().iter().map(|m| m.to_string()).collect();
        assert_eq!(labels, vec!["a1[L,0]", "a2[R,1]", "b1[R,0]", "b2[L,-1]"]);
        assert!(max_abs_diff(out.cov(), &sigma4_closed_form(p, SN)) < 1e-12);
        assert!((out.cov()[(0, 0)] - 0.61).abs() < 1e-12);
        assert!((out.cov()[(0, 3)] + 0.11).abs() < 1e-12);
        assert!((out.cov()[(0, 4)] - 0.255).abs() < 1e-12);
    }

    #[test]
    fn output_modes_look_lossy_individually() {
        let src = make_standard_form(StandardFormParams::experimental()).unwrap();
        let out = distribute(&src, &QPlateSpec::balanced()).unwrap();
        let block_min =
            |s: &GaussianState, k: usize| s.block(k, k).unwrap().symmetric_eigenvalues().min();
        // input pair (a, ã): 0.72·I and the 0.5·I vacuum partner
        let joint_min = block_min(&src, 0).min(SN);
        for k in 0..4 {
            let local = block_min(&out, k);
            assert!((local - 0.61).abs() < 1e-12);
            assert!(local > joint_min);
        }
        // the correlated two-mode source itself reaches down to a − |c|
        assert!((crate::linalg::min_symmetric_eigenvalue(src.cov()) - 0.21).abs() < 1e-12);
    }

    #[test]
    fn closed_form_special_cases() {
        let vac = sigma4_closed_form(StandardFormParams::new(SN, SN, 0.0, 0.0), SN);
        assert_eq!(vac, DMatrix::identity(8, 8) * SN);
        let a = 1.3;
        let m = sigma4_closed_form(StandardFormParams::new(a, a, 0.0, 0.0), SN);
        for i in 0..4 {
            for j in 4..8 {
                assert_eq!(m[(i, j)], 0.0);
            }
        }
        assert!((m[(1, 2)] - (a - SN) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn apply_checks_register_and_fixes_vacuum() {
        let reg = ModeRegister::anonymous(2).unwrap();
        let vac = GaussianState::vacuum(reg.clone());
        let bs = SymplecticTransform::beam_splitter(reg.clone(), 0, 1, PI / 4.0).unwrap();
        let out = apply(&bs, &vac).unwrap();
        assert!(max_abs_diff(out.cov(), vac.cov()) < 1e-15);
        assert_eq!(
            apply(&SymplecticTransform::identity(reg), &vac).unwrap(),
            vac
        );

        let other = GaussianState::vacuum(ModeRegister::anonymous(3).unwrap());
        assert!(matches!(
            apply(&bs, &other),
            Err(Error::RegisterMismatch { .. })
        ));
    }

    #[test]
    fn non_symplectic_matrices_are_rejected() {
        let reg = ModeRegister::anonymous(1).unwrap();
        let squash = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 2.0]));
        assert!(matches!(
            SymplecticTransform::new(squash, reg.clone(), reg.clone()),
            Err(Error::NonSymplectic { .. })
        ));
        // single-mode squeezer: symplectic but active
        let sq = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 0.5]));
        let t = SymplecticTransform::new(sq, reg.clone(), reg).unwrap();
        assert!(!t.is_passive());
    }

    #[test]
    fn opo_source_cases() {
        let vac = opo_source(0.0, 1.0).unwrap();
        assert!(max_abs_diff(vac.cov(), &(DMatrix::identity(4, 4) * SN)) < 1e-15);
        for r in [0.1, 0.5, 1.2] {
            assert!((opo_source(r, 1.0).unwrap().purity().unwrap() - 1.0).abs() < 1e-10);
        }
        // sn cosh 2r = 0.72 gives c1 slightly above the measured 0.51
        let r = (0.72f64 / SN).acosh() / 2.0;
        let s = opo_source(r, 1.0).unwrap();
        let c1 = s.cov()[(0, 2)];
        assert!((c1 - 0.518073).abs() < 1e-6);
        assert!(opo_source(-0.1, 1.0).is_err());
        assert!(opo_source(0.1, 0.0).is_err());
        assert!(opo_source(0.1, 1.1).is_err());
    }

    #[test]
    fn loss_channel_endpoints() {
        let s = opo_source(0.4, 1.0).unwrap();
        assert_eq!(uniform_loss(&s, 1.0).unwrap().cov(), s.cov());
        let heavy = uniform_loss(&s, 1e-12).unwrap();
        assert!(max_abs_diff(heavy.cov(), &(DMatrix::identity(4, 4) * SN)) < 1e-10);
    }
}
