//! Dense exact diagonalization of the rotated spin chain and discretized
//! Wilson-loop Berry phases.
//!
//! Nothing here uses the free-fermion solution: Hamiltonians are built in
//! the `2^N` spin basis and phases come from products of ground-state
//! overlaps around the rotation loop `phi in [0, pi]`. The results are the
//! reference against which the closed-form phases are checked.
//!
//! Basis convention: bit `i` of a basis index is site `i`, with 0 meaning
//! spin up (`sigma^z = +1`) and 1 spin down.

use std::f64::consts::PI;

use nalgebra::{Complex, DMatrix, DVector, Matrix2, Vector2};
use rayon::prelude::*;

use crate::error::{Error, Result};

type C64 = Complex<f64>;

pub const MAX_SITES: usize = 12;
pub const MIN_LOOP_STEPS: usize = 100;
/// Consecutive overlaps smaller than this mean the loop is under-resolved.
pub const MIN_OVERLAP: f64 = 1e-6;
const DEGENERACY_RTOL: f64 = 1e-8;
const RESIDUAL_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Subspace of fixed `prod_j sigma^z_j`.
///
/// `Even` (an even number of down spins) is the sector whose fermions obey
/// antiperiodic boundary conditions, i.e. the half-integer momentum grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    Full,
    Even,
    Odd,
}

impl Sector {
    fn contains(self, state: usize) -> bool {
        match self {
            Sector::Full => true,
            Sector::Even => state.count_ones() % 2 == 0,
            Sector::Odd => state.count_ones() % 2 == 1,
        }
    }

    pub fn basis(self, n_sites: usize) -> Vec<usize> {
        (0..1usize << n_sites).filter(|&s| self.contains(s)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseHamiltonian {
    n_sites: usize,
    matrix: DMatrix<C64>,
}

impl DenseHamiltonian {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    /// Exact entrywise Hermiticity.
    pub fn is_hermitian(&self) -> bool {
        let n = self.dimension();
        (0..n).all(|i| (i..n).all(|j| self.matrix[(i, j)] == self.matrix[(j, i)].conj()))
    }

    /// Block of the matrix on `sector`, rows and columns in ascending basis order.
    pub fn restrict(&self, sector: Sector) -> DMatrix<C64> {
        if sector == Sector::Full {
            return self.matrix.clone();
        }
        let basis = sector.basis(self.n_sites);
        DMatrix::from_fn(basis.len(), basis.len(), |i, j| self.matrix[(basis[i], basis[j])])
    }

    /// Sorted eigenvalues on `sector`.
    pub fn spectrum(&self, sector: Sector) -> Vec<f64> {
        let mut e: Vec<f64> = self.restrict(sector).symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Sum of `sigma^z` over all sites for a basis state.
fn magnetization(state: usize, n_sites: usize) -> i32 {
    n_sites as i32 - 2 * state.count_ones() as i32
}

/// `U(phi) H U(phi)^dagger` with `U(phi) = prod_j exp(i phi sigma^z_j / 2)` and
///
/// ```text
/// H = sum_i (1+alpha)/2 sx_i sx_{i+1} + (1-alpha)/2 sy_i sy_{i+1} + B sz_i
/// ```
///
/// With `Periodic` boundaries every site `i` couples to `(i + 1) mod N`, so a
/// two-site ring carries its bond twice.
pub fn build_hamiltonian(
    n_sites: usize,
    alpha: f64,
    field: f64,
    phi: f64,
    boundary: Boundary,
) -> Result<DenseHamiltonian> {
    if !(2..=MAX_SITES).contains(&n_sites) {
        return Err(Error::SizeCap(n_sites));
    }
    let dim = 1usize << n_sites;
    let bonds: Vec<(usize, usize)> = match boundary {
        Boundary::Periodic => (0..n_sites).map(|i| (i, (i + 1) % n_sites)).collect(),
        Boundary::Open => (0..n_sites - 1).map(|i| (i, i + 1)).collect(),
    };
    // Flipping two parallel spins changes the magnetization by -+4, which
    // the rotation dresses with exp(-+2 i phi).
    let raise = C64::from_polar(1.0, 2.0 * phi);
    let lower = raise.conj();

    let mut matrix = DMatrix::<C64>::zeros(dim, dim);
    for s in 0..dim {
        matrix[(s, s)] += C64::new(field * magnetization(s, n_sites) as f64, 0.0);
        for &(i, j) in &bonds {
            let target = s ^ (1 << i) ^ (1 << j);
            let (bi, bj) = ((s >> i) & 1, (s >> j) & 1);
            let amp = if bi != bj {
                // antiparallel: (sx sx + sy sy) / 2 exchanges the spins
                C64::new(1.0, 0.0)
            } else if bi == 0 {
                // up,up -> down,down
                lower * alpha
            } else {
                raise * alpha
            };
            matrix[(target, s)] += amp;
        }
    }
    Ok(DenseHamiltonian { n_sites, matrix })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundState {
    pub energy: f64,
    /// Eigenvector in the basis of the sector that was diagonalized.
    pub vector: DVector<C64>,
    /// Distance to the next eigenvalue.
    pub gap: f64,
    /// True when `gap < 1e-8 |H|`: the Berry phase is then ill-defined.
    pub degenerate: bool,
    pub residual: f64,
}

/// Lowest eigenpair of a Hermitian matrix.
pub fn ground_state_of(matrix: &DMatrix<C64>) -> Result<GroundState> {
    let eig = matrix.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energy = eig.eigenvalues[order[0]];
    let vector: DVector<C64> = eig.eigenvectors.column(order[0]).into_owned();

    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs())).max(f64::MIN_POSITIVE);
    let gap = order.get(1).map_or(f64::INFINITY, |&i| eig.eigenvalues[i] - energy);
    let residual = (matrix * &vector - &vector * C64::new(energy, 0.0)).norm();
    if residual > RESIDUAL_RTOL * scale {
        return Err(Error::NotConverged(residual));
    }
    Ok(GroundState {
        energy,
        vector,
        gap,
        degenerate: gap < DEGENERACY_RTOL * scale,
        residual,
    })
}

/// Ground state of `h` restricted to `sector`.
pub fn ground_state(h: &DenseHamiltonian, sector: Sector) -> Result<GroundState> {
    ground_state_of(&h.restrict(sector))
}

/// Lowest energies of the two parity sectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorReport {
    pub even_ground: f64,
    pub odd_ground: f64,
}

impl SectorReport {
    pub fn of(h: &DenseHamiltonian) -> Self {
        Self {
            even_ground: h.spectrum(Sector::Even)[0],
            odd_ground: h.spectrum(Sector::Odd)[0],
        }
    }

    /// True when the even sector holds the global ground state.
    pub fn even_is_ground(&self) -> bool {
        self.even_ground <= self.odd_ground
    }
}

/// `sum_j <psi|sigma^z_j|psi>` for a full-space state.
pub fn total_sz(state: &DVector<C64>, n_sites: usize) -> f64 {
    state
        .iter()
        .enumerate()
        .map(|(s, a)| a.norm_sqr() * magnetization(s, n_sites) as f64)
        .sum()
}

/// Embed a sector vector into the full `2^N` space.
pub fn embed(vector: &DVector<C64>, n_sites: usize, sector: Sector) -> DVector<C64> {
    let basis = sector.basis(n_sites);
    let mut full = DVector::zeros(1 << n_sites);
    for (i, &s) in basis.iter().enumerate() {
        full[s] = vector[i];
    }
    full
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopResult {
    pub phi_steps: usize,
    /// `-arg prod_j <psi_j|psi_{j+1}>`, reduced to `[0, 2 pi)`.
    pub phase: f64,
    pub overlaps_min: f64,
    /// Some consecutive overlap fell below [`MIN_OVERLAP`].
    pub under_resolved: bool,
}

impl LoopResult {
    pub fn is_valid(&self) -> bool {
        self.overlaps_min > 0.0 && !self.under_resolved
    }
}

fn reduce(phase: f64) -> f64 {
    let r = phase.rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

/// Discrete holonomy of a closed loop of states; the last state connects
/// back to the first. Independent of the phase of each state.
pub fn holonomy(states: &[DVector<C64>]) -> LoopResult {
    let n = states.len();
    let mut product = C64::new(1.0, 0.0);
    let mut overlaps_min = f64::INFINITY;
    for j in 0..n {
        let o = states[j].dotc(&states[(j + 1) % n]);
        let mag = o.norm();
        overlaps_min = overlaps_min.min(mag);
        product *= o;
        // keep the running product on the unit circle
        let pm = product.norm();
        if pm > 0.0 {
            product /= pm;
        }
    }
    LoopResult {
        phi_steps: n,
        phase: reduce(-product.arg()),
        overlaps_min,
        under_resolved: overlaps_min < MIN_OVERLAP,
    }
}

/// Many-body Berry phase of the ground state in `sector` around
/// `phi in [0, pi)` with `steps` points, periodic boundaries.
///
/// Each point is an independent eigensolve of `H(phi_j)`; degeneracy anywhere
/// on the loop is an error.
pub fn berry_phase_loop(
    n_sites: usize,
    alpha: f64,
    field: f64,
    steps: usize,
    sector: Sector,
) -> Result<LoopResult> {
    if steps < MIN_LOOP_STEPS {
        return Err(Error::InvalidArgument(format!(
            "loop needs at least {MIN_LOOP_STEPS} steps, got {steps}"
        )));
    }
    if !(2..=MAX_SITES).contains(&n_sites) {
        return Err(Error::SizeCap(n_sites));
    }
    let states = (0..steps)
        .into_par_iter()
        .map(|j| {
            let phi = PI * j as f64 / steps as f64;
            let h = build_hamiltonian(n_sites, alpha, field, phi, Boundary::Periodic)?;
            let gs = ground_state(&h, sector)?;
            if gs.degenerate {
                return Err(Error::Degenerate { gap: gs.gap });
            }
            Ok(gs.vector)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(holonomy(&states))
}

/// Pair Hamiltonian `2 [-(cos k - B) Z + alpha sin k (cos 2phi X - sin 2phi Y)]`
/// on `{|0>_k|0>_-k, |1>_k|1>_-k}`: the `(k, -k)` block of the rotated chain.
fn pair_hamiltonian(k: f64, field: f64, alpha: f64, phi: f64) -> Matrix2<C64> {
    let z = -2.0 * (k.cos() - field);
    let off = C64::from_polar(2.0 * alpha * k.sin(), 2.0 * phi);
    Matrix2::new(C64::new(z, 0.0), off, off.conj(), C64::new(-z, 0.0))
}

/// Berry phase of one `(k, -k)` pair from a discretized loop over
/// `phi in [0, pi]`, without reduction mod `2 pi`.
///
/// Each loop point diagonalizes the pair Hamiltonian. The unreduced value is
/// recovered by accumulating the small per-step phase increments in the gauge
/// where the empty-pair amplitude is real and non-negative. That gauge is
/// singular only when the pair is fully occupied along the whole loop
/// (`alpha sin k = 0`, `cos k < B`), where the value is the limit `2 pi`.
pub fn mode_berry_numeric(k: f64, field: f64, alpha: f64, steps: usize) -> Result<f64> {
    if steps < MIN_LOOP_STEPS {
        return Err(Error::InvalidArgument(format!(
            "loop needs at least {MIN_LOOP_STEPS} steps, got {steps}"
        )));
    }
    let mut states: Vec<Vector2<C64>> = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let phi = PI * j as f64 / steps as f64;
        let eig = pair_hamiltonian(k, field, alpha, phi).symmetric_eigen();
        let (lo, hi) = if eig.eigenvalues[0] <= eig.eigenvalues[1] { (0, 1) } else { (1, 0) };
        let gap = eig.eigenvalues[hi] - eig.eigenvalues[lo];
        if !(gap > 1e-12) {
            return Err(Error::Gapless { k, field });
        }
        let v: Vector2<C64> = eig.eigenvectors.column(lo).into_owned();
        states.push(v);
    }

    let empty_min = states.iter().map(|v| v[0].norm()).fold(f64::INFINITY, f64::min);
    if empty_min == 0.0 {
        return Ok(2.0 * PI);
    }
    for v in states.iter_mut() {
        let gauge = v[0].conj() / v[0].norm();
        *v *= gauge;
    }
    let mut total = 0.0;
    for w in states.windows(2) {
        total -= w[0].dotc(&w[1]).arg();
    }
    // closing segment: in this gauge the state at phi = pi equals the one at 0
    total -= states[steps].dotc(&states[0]).arg();
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn two_site_open_bond() {
        let h = build_hamiltonian(2, 1.0, 0.0, 0.0, Boundary::Open).unwrap();
        assert!(h.is_hermitian());
        assert_eq!(h.dimension(), 4);
        let e = h.spectrum(Sector::Full);
        assert!(max_abs_diff(&e, &[-1.0, -1.0, 1.0, 1.0]) < 1e-14);
        let gs = ground_state(&h, Sector::Full).unwrap();
        assert_relative_eq!(gs.energy, -1.0, epsilon = 1e-14);
        assert!(gs.degenerate);
        let gs = ground_state(&h, Sector::Even).unwrap();
        assert_relative_eq!(gs.energy, -1.0, epsilon = 1e-14);
        assert!(!gs.degenerate);
    }

    #[test]
    fn size_cap() {
        assert_eq!(build_hamiltonian(13, 1.0, 0.0, 0.0, Boundary::Periodic), Err(Error::SizeCap(13)));
        assert_eq!(build_hamiltonian(1, 1.0, 0.0, 0.0, Boundary::Open), Err(Error::SizeCap(1)));
    }

    #[test]
    fn diagonal_matrix_ground_state() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(-2.0, 0.0),
            C64::new(0.5, 0.0),
        ]));
        let gs = ground_state_of(&m).unwrap();
        assert_eq!(gs.energy, -2.0);
        assert_relative_eq!(gs.vector[1].norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(gs.gap, 2.5, epsilon = 1e-14);
    }

    #[test]
    fn phi_zero_has_real_entries_and_pi_periodicity() {
        let h0 = build_hamiltonian(4, 0.6, 0.3, 0.0, Boundary::Periodic).unwrap();
        assert!(h0.matrix().iter().all(|z| z.im == 0.0));
        for &phi in &[0.2, 1.1, 2.7] {
            let a = build_hamiltonian(5, 0.6, 0.3, phi, Boundary::Periodic).unwrap();
            let b = build_hamiltonian(5, 0.6, 0.3, phi + PI, Boundary::Periodic).unwrap();
            assert!(a.is_hermitian());
            let diff = (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-14);
        }
    }

    #[test]
    fn spectrum_independent_of_phi() {
        let base = build_hamiltonian(6, 0.5, 0.3, 0.0, Boundary::Periodic).unwrap().spectrum(Sector::Full);
        let rot = build_hamiltonian(6, 0.5, 0.3, 0.7, Boundary::Periodic).unwrap().spectrum(Sector::Full);
        assert!(max_abs_diff(&base, &rot) < 1e-10);
    }

    #[test]
    fn strong_field_polarizes() {
        let h = build_hamiltonian(6, 1.0, 2.0, 0.0, Boundary::Periodic).unwrap();
        let gs = ground_state(&h, Sector::Full).unwrap();
        assert!(!gs.degenerate);
        let sz = total_sz(&gs.vector, 6) / 6.0;
        assert!(sz < -0.9, "{sz}");
    }

    #[test]
    fn even_sector_energy_matches_paired_modes() {
        // E0 = -2 sum_{k>0} Lambda_k on the half-integer grid
        for &(n, alpha, b) in &[(4usize, 0.5, 0.0), (6, 1.0, 0.5), (8, 0.5, 0.5), (6, 0.3, -0.4)] {
            let h = build_hamiltonian(n, alpha, b, 0.0, Boundary::Periodic).unwrap();
            let e0 = ground_state(&h, Sector::Even).unwrap().energy;
            let pairs: f64 = (1..=n / 2)
                .map(|m| {
                    let k = (2 * m - 1) as f64 * PI / n as f64;
                    ((k.cos() - b).powi(2) + (alpha * k.sin()).powi(2)).sqrt()
                })
                .sum();
            assert_relative_eq!(e0, -2.0 * pairs, epsilon = 1e-10);
        }
    }

    #[test]
    fn n8_regression() {
        let h = build_hamiltonian(8, 0.5, 0.5, 0.0, Boundary::Periodic).unwrap();
        let report = SectorReport::of(&h);
        let gs = ground_state(&h, Sector::Full).unwrap();
        assert_relative_eq!(gs.energy, report.even_ground.min(report.odd_ground), epsilon = 1e-12);
        assert_relative_eq!(gs.energy, -6.74934558758853, epsilon = 1e-9);
    }

    #[test]
    fn holonomy_is_gauge_invariant() {
        use rand::{Rng, SeedableRng};
        let states: Vec<DVector<C64>> = (0..400)
            .map(|j| {
                let phi = PI * j as f64 / 400.0;
                let h = build_hamiltonian(4, 0.7, 0.2, phi, Boundary::Periodic).unwrap();
                ground_state(&h, Sector::Even).unwrap().vector
            })
            .collect();
        let base = holonomy(&states);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let scrambled: Vec<_> = states
            .iter()
            .map(|v| v * C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI)))
            .collect();
        let other = holonomy(&scrambled);
        let d = (base.phase - other.phase).abs();
        assert!(d.min(2.0 * PI - d) < 1e-12, "{d}");
    }

    #[test]
    fn strong_field_loop_is_trivial() {
        let r = berry_phase_loop(4, 0.5, 50.0, 200, Sector::Even).unwrap();
        let d = r.phase.min(2.0 * PI - r.phase);
        // all four spins down: phase 4 pi (1 - O(alpha^2/B^2)), i.e. ~0 mod 2 pi
        assert!(d < 1e-2, "{}", r.phase);
        assert!(r.is_valid());
    }

    #[test]
    fn loop_rejects_few_steps() {
        assert!(berry_phase_loop(4, 0.5, 0.1, 50, Sector::Even).is_err());
        assert!(mode_berry_numeric(0.3, 0.1, 0.5, 10).is_err());
    }

    #[test]
    fn mode_loop_examples() {
        // empty pair: no phase
        assert!(mode_berry_numeric(0.4, -3.0, 0.0, 200).unwrap().abs() < 1e-12);
        // fully occupied pair: 2 pi
        assert_eq!(mode_berry_numeric(0.4, 3.0, 0.0, 200).unwrap(), 2.0 * PI);
        let g = mode_berry_numeric(PI / 2.0, 0.5, 0.5, 10_000).unwrap();
        assert!((g - PI * (1.0 + 0.5f64.sqrt())).abs() < 1e-4, "{g}");
        assert!(matches!(mode_berry_numeric(0.0, 1.0, 0.5, 200), Err(Error::Gapless { .. })));
    }

    #[test]
    fn mode_loop_converges_second_order() {
        let exact = PI * (1.0 - (0.9f64.cos() - 0.2) / ((0.9f64.cos() - 0.2).powi(2) + (0.4 * 0.9f64.sin()).powi(2)).sqrt());
        let e1 = (mode_berry_numeric(0.9, 0.2, 0.4, 200).unwrap() - exact).abs();
        let e2 = (mode_berry_numeric(0.9, 0.2, 0.4, 400).unwrap() - exact).abs();
        let order = (e1 / e2).log2();
        assert!((order - 2.0).abs() < 0.1, "order {order}");
    }
}
