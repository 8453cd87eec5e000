//! Hydrogen ground state on a radial grid, and the two moments kappa needs.
//!
//! Atomic units throughout (hartree, Bohr radius). The radial equation
//! `-u''/2 + l(l+1)/(2 r^2) u - V(r) u = E u` is discretized by three-point
//! differences into a symmetric tridiagonal matrix `M` acting on
//! `y_i = sqrt(w_i) u(r_i)`, where `w_i` are the grid's quadrature weights, so
//! `sum y_i^2 = int u^2 dr` and every resolvent element is a plain `y^T (M - E)^-1 y`.

use serde::Serialize;

use crate::dispersion::{Convention, DipoleMoments};
use crate::error::{Error, Result};
use crate::linalg::SymTridiagonal;
use crate::output::fmt_num;
use crate::scalar::Scalar;
use crate::special::sine_integral;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Spacing<T> {
    Uniform,
    /// uniform in `ln r`, starting at `r_min`. The wall at `r_min` acts as a
    /// hard core and lifts s levels by about `2 r_min`, so keep it tiny.
    Log { r_min: T },
}

/// `n` interior points on `(0, r_max)`; `u` vanishes at both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RadialGrid<T> {
    pub r_max: T,
    pub n: usize,
    pub spacing: Spacing<T>,
}

pub const MIN_R_MAX: f64 = 30.0;
pub const DEFAULT_R_MAX: f64 = 40.0;
pub const DEFAULT_POINTS: usize = 20_000;

impl<T: Scalar> RadialGrid<T> {
    pub fn uniform(r_max: T, n: usize) -> Result<Self> {
        let g = Self {
            r_max,
            n,
            spacing: Spacing::Uniform,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn log(r_min: T, r_max: T, n: usize) -> Result<Self> {
        let g = Self {
            r_max,
            n,
            spacing: Spacing::Log { r_min },
        };
        g.validate()?;
        Ok(g)
    }

    /// Uniform, `r_max = 40`, 20000 points (`h ~ 0.002`).
    pub fn default_uniform() -> Self {
        Self::uniform(T::lit(DEFAULT_R_MAX), DEFAULT_POINTS).expect("default grid is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_max >= T::lit(MIN_R_MAX)) || !self.r_max.is_finite() {
            return Err(Error::Domain(format!("r_max must be >= {MIN_R_MAX}, got {}", self.r_max)));
        }
        if self.n < 16 {
            return Err(Error::Domain(format!("radial grid needs >= 16 points, got {}", self.n)));
        }
        if let Spacing::Log { r_min } = self.spacing {
            if !(r_min > T::zero()) || !(r_min < self.r_max) {
                return Err(Error::Domain(format!("log grid needs 0 < r_min < r_max, got {r_min}")));
            }
        }
        Ok(())
    }

    /// Same range with the spacing halved (`n -> 2n + 1`).
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n + 1,
            ..*self
        }
    }

    /// Step: `h` for uniform, `Delta ln r` for log.
    pub fn step(&self) -> T {
        let intervals = T::from_usize_lossy(self.n + 1);
        match self.spacing {
            Spacing::Uniform => self.r_max / intervals,
            Spacing::Log { r_min } => (self.r_max / r_min).ln() / intervals,
        }
    }

    pub fn points(&self) -> Vec<T> {
        let step = self.step();
        (1..=self.n)
            .map(|i| {
                let i = T::from_usize_lossy(i);
                match self.spacing {
                    Spacing::Uniform => i * step,
                    Spacing::Log { r_min } => r_min * (i * step).exp(),
                }
            })
            .collect()
    }

    /// Trapezoid weights (the end points carry `u = 0`).
    pub fn weights(&self) -> Vec<T> {
        let step = self.step();
        match self.spacing {
            Spacing::Uniform => vec![step; self.n],
            Spacing::Log { .. } => self.points().into_iter().map(|r| r * step).collect(),
        }
    }

    /// Kinetic plus centrifugal part of `M` for angular momentum `l`.
    fn kinetic(&self, l: u32, r: &[T]) -> (Vec<T>, Vec<T>) {
        let step = self.step();
        let inv2 = (step * step).recip();
        let half = T::lit(0.5);
        match self.spacing {
            Spacing::Uniform => {
                let ll = T::from_u32(l * (l + 1)).expect("small integer");
                let diag = r.iter().map(|&ri| inv2 + half * ll / (ri * ri)).collect();
                let off = vec![-half * inv2; self.n - 1];
                (diag, off)
            }
            Spacing::Log { .. } => {
                // u = sqrt(r) v, x = ln r, symmetrized with y = r v
                let lh = T::from_u32(l).expect("small integer") + half;
                let c = inv2 + half * lh * lh;
                let diag = r.iter().map(|&ri| c / (ri * ri)).collect();
                let off = r.windows(2).map(|p| -half * inv2 / (p[0] * p[1])).collect();
                (diag, off)
            }
        }
    }
}

/// `(2/pi) Si(Lambda r) / r`; `Lambda = inf` gives `1/r`.
pub fn smeared_coulomb<T: Scalar>(r: T, lambda: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    if !(lambda > T::zero()) {
        return Err(Error::Domain(format!("cutoff must be positive or infinite, got {lambda}")));
    }
    if lambda.is_infinite() {
        return Ok(r.recip());
    }
    Ok(T::lit(2.0) / T::PI() * sine_integral(lambda * r)? / r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomSolution<T> {
    pub energy: T,
    /// `u(r_i) = r_i psi(r_i)` at the interior points, `u >= 0`
    pub u: Vec<T>,
    pub grid: RadialGrid<T>,
    /// `Lambda` in inverse Bohr radii, `inf` for plain Coulomb
    pub cutoff: T,
    r: Vec<T>,
    w: Vec<T>,
    potential: Vec<T>,
}

fn potential_on<T: Scalar>(r: &[T], lambda: T) -> Result<Vec<T>> {
    r.iter().map(|&ri| smeared_coulomb(ri, lambda)).collect()
}

fn hamiltonian<T: Scalar>(grid: &RadialGrid<T>, l: u32, r: &[T], v: &[T]) -> Result<SymTridiagonal<T>> {
    let (mut diag, off) = grid.kinetic(l, r);
    for (d, &vi) in diag.iter_mut().zip(v) {
        *d = *d - vi;
    }
    SymTridiagonal::new(diag, off)
}

/// Lowest `l = 0` eigenpair.
pub fn solve_ground<T: Scalar>(grid: &RadialGrid<T>, lambda: T) -> Result<AtomSolution<T>> {
    grid.validate()?;
    let r = grid.points();
    let w = grid.weights();
    let potential = potential_on(&r, lambda)?;
    let h = hamiltonian(grid, 0, &r, &potential)?;
    let energy = h.eigenvalue(0)?;
    let mut y = h.eigenvector(energy)?;
    // residual check: the eigensolve must actually have converged
    let hy = h.matvec(&y);
    let resid = hy
        .iter()
        .zip(&y)
        .map(|(&a, &b)| (a - energy * b).powi(2))
        .sum::<T>()
        .sqrt();
    // componentwise scale || |H| |y| ||, meaningful on graded grids too
    let scale = abs_matvec(&h, &y).iter().map(|&v| v * v).sum::<T>().sqrt();
    let tol = T::lit(1e-8).max(T::lit(100.0) * T::epsilon());
    if !(resid <= tol * scale) {
        return Err(Error::Solver(format!(
            "ground state eigenpair residual {resid:e} (matrix scale {scale:e}, E = {energy})"
        )));
    }
    if y.iter().copied().sum::<T>() < T::zero() {
        y.iter_mut().for_each(|v| *v = -*v);
    }
    let u = y
        .iter()
        .zip(&w)
        .map(|(&yi, &wi)| (yi / wi.sqrt()).max(T::zero()))
        .collect();
    Ok(AtomSolution {
        energy,
        u,
        grid: *grid,
        cutoff: lambda,
        r,
        w,
        potential,
    })
}

impl<T: Scalar> AtomSolution<T> {
    /// Trial state from a sampled `u(r)`, normalized on the grid. The energy
    /// is the Rayleigh quotient.
    pub fn from_trial(grid: &RadialGrid<T>, lambda: T, u: impl Fn(T) -> T) -> Result<Self> {
        grid.validate()?;
        let r = grid.points();
        let w = grid.weights();
        let potential = potential_on(&r, lambda)?;
        let mut y: Vec<T> = r.iter().zip(&w).map(|(&ri, &wi)| u(ri) * wi.sqrt()).collect();
        let norm = y.iter().map(|&v| v * v).sum::<T>().sqrt();
        if !(norm > T::zero()) || !norm.is_finite() {
            return Err(Error::Domain("trial function has zero or non-finite norm".into()));
        }
        y.iter_mut().for_each(|v| *v = *v / norm);
        let h = hamiltonian(grid, 0, &r, &potential)?;
        let energy = dot(&y, &h.matvec(&y));
        let u = y.iter().zip(&w).map(|(&yi, &wi)| yi / wi.sqrt()).collect();
        Ok(Self {
            energy,
            u,
            grid: *grid,
            cutoff: lambda,
            r,
            w,
            potential,
        })
    }

    pub fn radii(&self) -> &[T] {
        &self.r
    }

    fn y(&self) -> Vec<T> {
        self.u.iter().zip(&self.w).map(|(&u, &w)| u * w.sqrt()).collect()
    }

    /// `int f(r) u^2 dr` on the grid.
    pub fn expectation(&self, f: impl Fn(T) -> T) -> T {
        self.r
            .iter()
            .zip(&self.u)
            .zip(&self.w)
            .map(|((&r, &u), &w)| w * f(r) * u * u)
            .sum()
    }

    pub fn norm_sq(&self) -> T {
        self.expectation(|_| T::one())
    }

    /// `<V>` with the sign of the attractive potential (negative).
    pub fn potential_energy(&self) -> T {
        let y = self.y();
        -y.iter().zip(&self.potential).map(|(&y, &v)| v * y * y).sum::<T>()
    }

    /// `<T>` from the same difference operator as the Hamiltonian.
    pub fn kinetic_energy(&self) -> Result<T> {
        let (diag, off) = self.grid.kinetic(0, &self.r);
        let k = SymTridiagonal::new(diag, off)?;
        let y = self.y();
        Ok(dot(&y, &k.matvec(&y)))
    }

    /// CSV `r,u`, including the two Dirichlet end points.
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# energy={} cutoff={} r_max={} n={} spacing={}\nr,u\n",
            fmt_num(self.energy.as_f64()),
            fmt_num(self.cutoff.as_f64()),
            fmt_num(self.grid.r_max.as_f64()),
            self.grid.n,
            match self.grid.spacing {
                Spacing::Uniform => "uniform",
                Spacing::Log { .. } => "log",
            }
        );
        let zero = fmt_num(0.0);
        out.push_str(&format!("{zero},{zero}\n"));
        for (r, u) in self.r.iter().zip(&self.u) {
            out.push_str(&format!("{},{}\n", fmt_num(r.as_f64()), fmt_num(u.as_f64())));
        }
        out.push_str(&format!("{},{zero}\n", fmt_num(self.grid.r_max.as_f64())));
        out
    }

    fn p_source(&self) -> Vec<T> {
        // radial part of z psi, up to the 1/sqrt(3) angular factor, as y-vector
        self.y().iter().zip(&self.r).map(|(&y, &r)| r * y).collect()
    }

    fn p_hamiltonian(&self) -> Result<SymTridiagonal<T>> {
        hamiltonian(&self.grid, 1, &self.r, &self.potential)
    }
}

fn abs_matvec<T: Scalar>(h: &SymTridiagonal<T>, y: &[T]) -> Vec<T> {
    let (d, e) = (h.diag(), h.off());
    (0..y.len())
        .map(|i| {
            let mut v = d[i].abs() * y[i].abs();
            if i > 0 {
                v = v + e[i - 1].abs() * y[i - 1].abs();
            }
            if i + 1 < y.len() {
                v = v + e[i].abs() * y[i + 1].abs();
            }
            v
        })
        .collect()
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// `<r^2> = int r^2 u^2 dr`.
pub fn moment_r2<T: Scalar>(sol: &AtomSolution<T>) -> T {
    sol.expectation(|r| r * r)
}

/// `<z (H - E)^-1 z>` via the `l = 1` inhomogeneous equation
/// `(H_1 - E) w = r u`, giving `(1/3) int w r u dr`.
pub fn dalgarno_lewis<T: Scalar>(sol: &AtomSolution<T>) -> Result<T> {
    let h1 = sol.p_hamiltonian()?;
    let f = sol.p_source();
    let w = h1.solve_shifted(sol.energy, &f)?;
    let value = dot(&w, &f) / T::lit(3.0);
    if !value.is_finite() {
        return Err(Error::Solver("resolvent solve produced a non-finite value".into()));
    }
    Ok(value)
}

/// Oracle for [`dalgarno_lewis`]: `(1/3) sum_k |<k|r u>|^2 / (E_k - E)` over
/// the lowest `n_states` grid eigenvectors of the `l = 1` matrix.
pub fn sum_over_states<T: Scalar>(sol: &AtomSolution<T>, n_states: usize) -> Result<T> {
    let h1 = sol.p_hamiltonian()?;
    if n_states == 0 || n_states > h1.len() {
        return Err(Error::Domain(format!("n_states must be in 1..={}", h1.len())));
    }
    let f = sol.p_source();
    let mut sum = T::zero();
    for k in 0..n_states {
        let ek = h1.eigenvalue(k)?;
        let phi = h1.eigenvector(ek)?;
        let overlap = dot(&phi, &f);
        sum = sum + overlap * overlap / (ek - sol.energy);
    }
    Ok(sum / T::lit(3.0))
}

/// `alpha~_E = c <z (H-E)^-1 z>` with `c` from the convention,
/// `alpha~_M = -alpha^2 (1/4) (1/3) <x^2>`.
pub fn dipole_moments<T: Scalar>(
    sol: &AtomSolution<T>,
    alpha_fs: T,
    convention: Convention,
) -> Result<DipoleMoments<T>> {
    let c = T::from_u32(convention.factor()).expect("small integer");
    let alpha_e = c * dalgarno_lewis(sol)?;
    let alpha_m = -alpha_fs * alpha_fs * moment_r2(sol) / T::lit(12.0);
    Ok(DipoleMoments::new(alpha_e, alpha_m, convention))
}

/// Ground energy extrapolated from `grid` and its refinement, assuming the
/// second-order error of the difference scheme.
pub fn richardson_energy<T: Scalar>(grid: &RadialGrid<T>, lambda: T) -> Result<T> {
    let coarse = solve_ground(grid, lambda)?.energy;
    let fine = solve_ground(&grid.refined(), lambda)?.energy;
    Ok((T::lit(4.0) * fine - coarse) / T::lit(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_grid() -> RadialGrid<f64> {
        RadialGrid::uniform(40.0, 4000).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::uniform(20.0, 4000).is_err());
        assert!(RadialGrid::uniform(40.0, 4).is_err());
        assert!(RadialGrid::log(0.0, 40.0, 4000).is_err());
        let g = RadialGrid::uniform(40.0, 19).unwrap();
        assert_eq!(g.points()[0], 2.0);
        assert_eq!(g.refined().step(), 1.0);
    }

    #[test]
    fn potential_values() {
        assert_eq!(smeared_coulomb(2.0, f64::INFINITY).unwrap(), 0.5);
        let v: f64 = smeared_coulomb(1.0, 1.0).unwrap();
        assert!((v - 0.602_295_188_897_978_5).abs() < 1e-15, "{v}");
        assert!((smeared_coulomb(1.0f64, 1e9).unwrap() - 1.0).abs() < 1e-8);
        assert!(smeared_coulomb(0.0, 1.0).is_err());
    }

    #[test]
    fn coulomb_ground_state_on_small_grid() {
        let sol = solve_ground(&small_grid(), f64::INFINITY).unwrap();
        // h = 0.01: error ~ h^2 / 12 * <...>
        assert!((sol.energy + 0.5).abs() < 1e-4, "{}", sol.energy);
        assert!((sol.norm_sq() - 1.0).abs() < 1e-12);
        assert!(sol.u.iter().all(|&u| u >= 0.0));
    }

    #[test]
    fn trial_dilation_scales_r2() {
        let g = small_grid();
        let a = AtomSolution::from_trial(&g, f64::INFINITY, |r| r * (-r).exp()).unwrap();
        let b = AtomSolution::from_trial(&g, f64::INFINITY, |r| r * (-r / 2.0).exp()).unwrap();
        assert!((moment_r2(&a) - 3.0).abs() < 1e-5);
        assert!((moment_r2(&b) / moment_r2(&a) - 4.0).abs() < 1e-4);
    }

    #[test]
    fn dalgarno_lewis_on_small_grid() {
        let sol = solve_ground(&small_grid(), f64::INFINITY).unwrap();
        let dl = dalgarno_lewis(&sol).unwrap();
        assert!((dl - 2.25).abs() < 1e-3, "{dl}");
    }

    #[test]
    fn convention_factor() {
        let sol = solve_ground(&small_grid(), f64::INFINITY).unwrap();
        let p = dipole_moments(&sol, 0.0, Convention::PaperFactor2).unwrap();
        let q = dipole_moments(&sol, 0.0, Convention::NoFactor2).unwrap();
        assert_eq!(p.alpha_m, 0.0);
        assert_eq!(p.alpha_e, 2.0 * q.alpha_e);
    }

    #[test]
    fn csv_has_end_points() {
        let sol = solve_ground(&RadialGrid::uniform(30.0, 100).unwrap(), f64::INFINITY).unwrap();
        let csv = sol.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "r,u");
        assert_eq!(lines.len(), 2 + 102);
        assert!(lines[2].starts_with("0.0"));
    }
}
