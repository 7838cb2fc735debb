//! Finite-element matrix pairs for the quadratic forms of the strip.
//!
//! The parameter domain `(-L, L) x (0, 1)` carries bilinear tensor-product elements
//! on a uniform grid. Nodes on `t = 0` and `s = +-L` are Dirichlet and removed; the
//! free edge `t = 1` is kept, so Neumann and Robin conditions are natural. Unknowns
//! are numbered t-fastest, which makes every matrix banded with bandwidth `n_t`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{ChainForm, CsrMatrix};
use crate::profiles::{metric_jet, Scaling, StripProfile};

/// Uniform grid on `[-L, L] x [0, 1]` with `n_s x n_t` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub half_length: f64,
    pub n_s: usize,
    pub n_t: usize,
}

impl GridSpec {
    pub fn new(half_length: f64, n_s: usize, n_t: usize) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(invalid(
                "half_length",
                format!("must be positive, got {half_length}"),
            ));
        }
        if n_s < 8 || n_t < 8 {
            return Err(Error::GridTooCoarse(format!(
                "{n_s} x {n_t} nodes; both counts must be at least 8"
            )));
        }
        Ok(Self {
            half_length,
            n_s,
            n_t,
        })
    }

    pub fn hs(&self) -> f64 {
        2.0 * self.half_length / (self.n_s - 1) as f64
    }

    pub fn ht(&self) -> f64 {
        1.0 / (self.n_t - 1) as f64
    }

    pub fn s(&self, i: usize) -> f64 {
        -self.half_length + i as f64 * self.hs()
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.ht()
    }

    /// Free nodes per `s` column (all but `t = 0`).
    pub fn column_len(&self) -> usize {
        self.n_t - 1
    }

    pub fn unknowns(&self) -> usize {
        (self.n_s - 2) * self.column_len()
    }

    /// Unknown index of node `(i, j)`, or `None` for Dirichlet nodes.
    pub fn dof(&self, i: usize, j: usize) -> Option<usize> {
        if i == 0 || i + 1 >= self.n_s || j == 0 || j >= self.n_t {
            None
        } else {
            Some((i - 1) * self.column_len() + (j - 1))
        }
    }

    /// Node `(i, j)` of an unknown index.
    pub fn node(&self, dof: usize) -> (usize, usize) {
        (dof / self.column_len() + 1, dof % self.column_len() + 1)
    }

    /// The same spacing on `[-2L, 2L]`.
    pub fn doubled(&self) -> Self {
        Self {
            half_length: 2.0 * self.half_length,
            n_s: 2 * (self.n_s - 1) + 1,
            n_t: self.n_t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormTag {
    BEps,
    DEps,
    YEps,
    Effective1d,
    Decoupled,
    HardyMass,
}

/// How unknowns map to grid nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofMap {
    Strip(GridSpec),
    /// Interior nodes of `n` uniform nodes on `[-L, L]`.
    Line {
        half_length: f64,
        n: usize,
    },
}

/// Stiffness/mass pair of a discretized quadratic form.
#[derive(Debug, Clone)]
pub struct FormPair {
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub dof_map: DofMap,
    pub tag: FormTag,
}

impl FormPair {
    pub fn size(&self) -> usize {
        self.stiffness.nrows()
    }

    pub fn grid(&self) -> Option<GridSpec> {
        match self.dof_map {
            DofMap::Strip(g) => Some(g),
            DofMap::Line { .. } => None,
        }
    }
}

/// Pointwise coefficients of a form `int a_ss |d_s u|^2 + a_tt |d_t u|^2 + p u^2
/// - g u d_s u` with mass weight `m`.
#[derive(Debug, Clone, Copy, Default)]
struct Coefficients {
    ss: f64,
    tt: f64,
    potential: f64,
    mixed: f64,
    mass: f64,
}

/// Accumulates the 9-point stencil of every unknown.
struct Stencil {
    grid: GridSpec,
    rows: Vec<[f64; 9]>,
}

impl Stencil {
    fn new(grid: GridSpec) -> Self {
        Self {
            grid,
            rows: vec![[0.0; 9]; grid.unknowns()],
        }
    }

    fn add(&mut self, a: (usize, usize), b: (usize, usize), v: f64) {
        if let (Some(row), Some(_)) = (self.grid.dof(a.0, a.1), self.grid.dof(b.0, b.1)) {
            let di = b.0 + 1 - a.0;
            let dj = b.1 + 1 - a.1;
            self.rows[row][3 * di + dj] += v;
        }
    }

    fn into_csr(self) -> CsrMatrix {
        let g = self.grid;
        let mut triplets = Vec::with_capacity(9 * self.rows.len());
        for (row, stencil) in self.rows.iter().enumerate() {
            let (i, j) = g.node(row);
            for di in 0..3 {
                for dj in 0..3 {
                    if let Some(col) = g.dof(i + di - 1, j + dj - 1) {
                        triplets.push((row, col, stencil[3 * di + dj]));
                    }
                }
            }
        }
        CsrMatrix::from_triplets(g.unknowns(), g.unknowns(), &triplets).expect("stencil in range")
    }
}

const GAUSS_2: [f64; 2] = [0.211_324_865_405_187_1, 0.788_675_134_594_812_9];

fn assemble_pair(
    grid: GridSpec,
    coefficients: &dyn Fn(f64, f64) -> Coefficients,
    boundary: Option<&dyn Fn(f64) -> f64>,
) -> Result<(CsrMatrix, CsrMatrix)> {
    let (hs, ht) = (grid.hs(), grid.ht());
    let mut stiff = Stencil::new(grid);
    let mut mass = Stencil::new(grid);
    let w = 0.25 * hs * ht;
    for i in 0..grid.n_s - 1 {
        for j in 0..grid.n_t - 1 {
            let nodes = [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)];
            let mut ke = [[0.0; 4]; 4];
            let mut me = [[0.0; 4]; 4];
            for &xi in &GAUSS_2 {
                for &eta in &GAUSS_2 {
                    let s = grid.s(i) + xi * hs;
                    let t = grid.t(j) + eta * ht;
                    let c = coefficients(s, t);
                    for v in [c.ss, c.tt, c.potential, c.mixed, c.mass] {
                        if !v.is_finite() {
                            return Err(Error::NonFinite {
                                what: "form coefficient",
                                s,
                            });
                        }
                    }
                    let phi = [
                        (1.0 - xi) * (1.0 - eta),
                        xi * (1.0 - eta),
                        (1.0 - xi) * eta,
                        xi * eta,
                    ];
                    let ds = [-(1.0 - eta) / hs, (1.0 - eta) / hs, -eta / hs, eta / hs];
                    let dt = [-(1.0 - xi) / ht, -xi / ht, (1.0 - xi) / ht, xi / ht];
                    for a in 0..4 {
                        for b in 0..4 {
                            ke[a][b] += w
                                * (c.ss * ds[a] * ds[b]
                                    + c.tt * dt[a] * dt[b]
                                    + c.potential * phi[a] * phi[b]
                                    - 0.5 * c.mixed * (phi[a] * ds[b] + phi[b] * ds[a]));
                            me[a][b] += w * c.mass * phi[a] * phi[b];
                        }
                    }
                }
            }
            if let (Some(v), true) = (boundary, j + 2 == grid.n_t) {
                for &xi in &GAUSS_2 {
                    let s = grid.s(i) + xi * hs;
                    let vb = v(s);
                    if !vb.is_finite() {
                        return Err(Error::NonFinite {
                            what: "boundary coefficient",
                            s,
                        });
                    }
                    let phi = [1.0 - xi, xi];
                    for a in 0..2 {
                        for b in 0..2 {
                            ke[2 + a][2 + b] += 0.5 * hs * vb * phi[a] * phi[b];
                        }
                    }
                }
            }
            for a in 0..4 {
                for b in 0..4 {
                    stiff.add(nodes[a], nodes[b], ke[a][b]);
                    mass.add(nodes[a], nodes[b], me[a][b]);
                }
            }
        }
    }
    Ok((stiff.into_csr(), mass.into_csr()))
}

fn check_admissible(profile: &StripProfile, eps: f64, grid: &GridSpec) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(invalid("epsilon", format!("must be positive, got {eps}")));
    }
    let x = eps * profile.bounds.sup_kappa;
    if x >= 1.0 {
        return Err(Error::Hypothesis(format!(
            "eps * sup|kappa| = {x} >= 1: the strip is not a tubular neighbourhood"
        )));
    }
    let _ = grid;
    Ok(())
}

/// The weighted form `int |d_s u|^2 / f + eps^-2 int |d_t u|^2 f` with mass `int u^2 f`.
pub fn assemble_b(profile: &StripProfile, eps: f64, grid: GridSpec) -> Result<FormPair> {
    check_admissible(profile, eps, &grid)?;
    let inv_eps2 = 1.0 / (eps * eps);
    let coefficients = |s: f64, t: f64| {
        let f = metric_jet(profile, eps, s, t, Scaling::Thin).f;
        Coefficients {
            ss: 1.0 / f,
            tt: inv_eps2 * f,
            mass: f,
            ..Default::default()
        }
    };
    let (stiffness, mass) = assemble_pair(grid, &coefficients, None)?;
    Ok(FormPair {
        stiffness,
        mass,
        dof_map: DofMap::Strip(grid),
        tag: FormTag::BEps,
    })
}

/// Potential `V_eps` of the flattened form at `(s, t)`.
pub fn potential_v(profile: &StripProfile, eps: f64, s: f64, t: f64) -> f64 {
    let j = metric_jet(profile, eps, s, t, Scaling::Thin);
    let f2 = j.f * j.f;
    0.25 * j.f_s * j.f_s / (f2 * f2) - 0.25 / (eps * eps) * j.f_t * j.f_t / f2
        + 0.5 / (eps * eps) * j.f_tt / j.f
}

/// Boundary coefficient `v_eps(s)` on `t = 1`.
pub fn boundary_v(profile: &StripProfile, eps: f64, s: f64) -> f64 {
    let k = profile.kappa(s);
    let tau2 = profile.tau_sq(s);
    let a = 1.0 - eps * k;
    (k - eps * k * k - eps * tau2) / (2.0 * eps * (a * a + eps * eps * tau2))
}

/// The flattened form `d_eps`, unitarily equivalent to `b_eps`, with flat mass.
pub fn assemble_d(profile: &StripProfile, eps: f64, grid: GridSpec) -> Result<FormPair> {
    check_admissible(profile, eps, &grid)?;
    let inv_eps2 = 1.0 / (eps * eps);
    let coefficients = |s: f64, t: f64| {
        let j = metric_jet(profile, eps, s, t, Scaling::Thin);
        let f2 = j.f * j.f;
        Coefficients {
            ss: 1.0 / f2,
            tt: inv_eps2,
            potential: 0.25 * j.f_s * j.f_s / (f2 * f2) - 0.25 * inv_eps2 * j.f_t * j.f_t / f2
                + 0.5 * inv_eps2 * j.f_tt / j.f,
            mixed: j.f_s / (f2 * j.f),
            mass: 1.0,
        }
    };
    let boundary = |s: f64| boundary_v(profile, eps, s);
    let (stiffness, mass) = assemble_pair(grid, &coefficients, Some(&boundary))?;
    Ok(FormPair {
        stiffness,
        mass,
        dof_map: DofMap::Strip(grid),
        tag: FormTag::DEps,
    })
}

/// Boundary coefficient `w_eps(s)` of the dilated form on `t = 1`.
pub fn boundary_w(profile: &StripProfile, eps: f64, s: f64) -> f64 {
    let k = profile.kappa(s);
    let tau2 = profile.tau_sq(s);
    let a = 1.0 - eps * k;
    0.5 * (k - eps * k * k - tau2) / (a * a + eps * tau2)
}

/// `eps` times the dilated form `y_eps`, with flat mass.
pub fn assemble_y_scaled(profile: &StripProfile, eps: f64, grid: GridSpec) -> Result<FormPair> {
    check_admissible(profile, eps, &grid)?;
    let inv_eps = 1.0 / eps;
    let coefficients = |s: f64, t: f64| {
        let j = metric_jet(profile, eps, s, t, Scaling::Dilated);
        let h2 = j.f * j.f;
        Coefficients {
            ss: 1.0 / h2,
            tt: inv_eps,
            potential: 0.25 * j.f_s * j.f_s / (h2 * h2) - 0.25 * inv_eps * j.f_t * j.f_t / h2
                + 0.5 * inv_eps * j.f_tt / j.f,
            mixed: j.f_s / (h2 * j.f),
            mass: 1.0,
        }
    };
    let boundary = |s: f64| boundary_w(profile, eps, s);
    let (stiffness, mass) = assemble_pair(grid, &coefficients, Some(&boundary))?;
    Ok(FormPair {
        stiffness,
        mass,
        dof_map: DofMap::Strip(grid),
        tag: FormTag::YEps,
    })
}

/// Three-point `-u'' + V u` on `[-L, L]` with `n` nodes, Dirichlet ends, identity mass.
pub fn effective_chain(
    potential: &dyn Fn(f64) -> f64,
    half_length: f64,
    n: usize,
) -> Result<ChainForm> {
    if n < 16 {
        return Err(Error::GridTooCoarse(format!("{n} nodes; need at least 16")));
    }
    if !(half_length > 0.0) {
        return Err(invalid("half_length", "must be positive"));
    }
    let h = 2.0 * half_length / (n - 1) as f64;
    let node = (0..n)
        .map(|i| potential(-half_length + i as f64 * h) * h * h)
        .collect();
    Ok(ChainForm {
        edge: vec![1.0; n - 1],
        node,
        mass: vec![h * h; n],
        clamp_left: true,
        clamp_right: true,
    })
}

pub fn assemble_effective_1d(
    potential: &dyn Fn(f64) -> f64,
    half_length: f64,
    n: usize,
) -> Result<FormPair> {
    let chain = effective_chain(potential, half_length, n)?;
    let h2 = chain.mass[0];
    let (diag, off) = chain.stiffness();
    let m = diag.len();
    let mut triplets = Vec::with_capacity(3 * m);
    for i in 0..m {
        if i > 0 {
            triplets.push((i, i - 1, off[i - 1] / h2));
        }
        triplets.push((i, i, diag[i] / h2));
        if i + 1 < m {
            triplets.push((i, i + 1, off[i] / h2));
        }
    }
    Ok(FormPair {
        stiffness: CsrMatrix::from_triplets(m, m, &triplets)?,
        mass: CsrMatrix::from_diagonal(&vec![1.0; m]),
        dof_map: DofMap::Line { half_length, n },
        tag: FormTag::Effective1d,
    })
}

/// Linear finite elements for `-u'' + V u` on `[-L, L]` with `n` nodes and Dirichlet
/// ends, using the `s` discretization of the strip forms (2-point Gauss per cell).
pub fn assemble_effective_fe(
    potential: &dyn Fn(f64) -> f64,
    half_length: f64,
    n: usize,
) -> Result<FormPair> {
    if n < 8 {
        return Err(Error::GridTooCoarse(format!("{n} nodes; need at least 8")));
    }
    if !(half_length > 0.0) {
        return Err(invalid("half_length", "must be positive"));
    }
    let h = 2.0 * half_length / (n - 1) as f64;
    let m = n - 2;
    let mut stiff = Vec::with_capacity(4 * (n - 1));
    let mut mass = Vec::with_capacity(4 * (n - 1));
    for c in 0..n - 1 {
        let mut ke = [[0.0; 2]; 2];
        let mut me = [[0.0; 2]; 2];
        for &xi in &GAUSS_2 {
            let s = -half_length + (c as f64 + xi) * h;
            let v = potential(s);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "effective potential",
                    s,
                });
            }
            let phi = [1.0 - xi, xi];
            let d = [-1.0 / h, 1.0 / h];
            for a in 0..2 {
                for b in 0..2 {
                    ke[a][b] += 0.5 * h * (d[a] * d[b] + v * phi[a] * phi[b]);
                    me[a][b] += 0.5 * h * phi[a] * phi[b];
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                let (i, j) = (c + a, c + b);
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    continue;
                }
                stiff.push((i - 1, j - 1, ke[a][b]));
                mass.push((i - 1, j - 1, me[a][b]));
            }
        }
    }
    Ok(FormPair {
        stiffness: CsrMatrix::from_triplets(m, m, &stiff)?,
        mass: CsrMatrix::from_triplets(m, m, &mass)?,
        dof_map: DofMap::Line { half_length, n },
        tag: FormTag::Effective1d,
    })
}

/// Lowest eigenvalues of the three-point effective operator, from bisection and
/// difference-form Rayleigh quotients.
pub fn effective_eigenvalues(
    potential: &dyn Fn(f64) -> f64,
    half_length: f64,
    n: usize,
    count: usize,
) -> Result<Vec<f64>> {
    let chain = effective_chain(potential, half_length, n)?;
    (0..count).map(|j| Ok(chain.eigenpair(j)?.value)).collect()
}

/// Decoupled operator `(-d_s^2 + kappa_g/eps) (x) I + I (x) eps^-2 (-d_t^2)` on the
/// same finite-element space as the strip forms. Its mass is the flat mass, so it
/// shares an inner product with [`assemble_d`].
pub fn assemble_decoupled(profile: &StripProfile, eps: f64, grid: GridSpec) -> Result<FormPair> {
    check_admissible(profile, eps, &grid)?;
    let inv_eps2 = 1.0 / (eps * eps);
    let coefficients = |s: f64, _t: f64| Coefficients {
        ss: 1.0,
        tt: inv_eps2,
        potential: profile.kappa(s) / eps,
        mixed: 0.0,
        mass: 1.0,
    };
    let (stiffness, mass) = assemble_pair(grid, &coefficients, None)?;
    Ok(FormPair {
        stiffness,
        mass,
        dof_map: DofMap::Strip(grid),
        tag: FormTag::Decoupled,
    })
}

/// One-dimensional linear finite elements along `s` (Dirichlet ends) and along `t`
/// (Dirichlet at 0, free at 1), whose Kronecker products give the tensor forms.
#[derive(Debug, Clone)]
pub struct TensorFactors {
    pub stiffness_s: nalgebra::DMatrix<f64>,
    pub mass_s: nalgebra::DMatrix<f64>,
    /// `int V phi_i phi_j ds` with 2-point Gauss per cell.
    pub potential_s: nalgebra::DMatrix<f64>,
    pub stiffness_t: nalgebra::DMatrix<f64>,
    pub mass_t: nalgebra::DMatrix<f64>,
}

/// Dense 1D factors of the tensor-product space (small grids only).
pub fn tensor_factors(grid: GridSpec, potential: &dyn Fn(f64) -> f64) -> TensorFactors {
    use nalgebra::DMatrix;
    let line = |n: usize, h: f64, drop_right: bool, x0: f64| {
        let m = n - 1 - usize::from(drop_right);
        let mut k = DMatrix::zeros(m, m);
        let mut mm = DMatrix::zeros(m, m);
        let mut p = DMatrix::zeros(m, m);
        for c in 0..n - 1 {
            let idx = |node: usize| -> Option<usize> {
                if node == 0 || (drop_right && node == n - 1) {
                    None
                } else {
                    Some(node - 1)
                }
            };
            for &xi in &GAUSS_2 {
                let phi = [1.0 - xi, xi];
                let d = [-1.0 / h, 1.0 / h];
                let v = potential(x0 + (c as f64 + xi) * h);
                for a in 0..2 {
                    for b in 0..2 {
                        if let (Some(i), Some(j)) = (idx(c + a), idx(c + b)) {
                            k[(i, j)] += 0.5 * h * d[a] * d[b];
                            mm[(i, j)] += 0.5 * h * phi[a] * phi[b];
                            p[(i, j)] += 0.5 * h * v * phi[a] * phi[b];
                        }
                    }
                }
            }
        }
        (k, mm, p)
    };
    let (stiffness_s, mass_s, potential_s) = line(grid.n_s, grid.hs(), true, -grid.half_length);
    let (stiffness_t, mass_t, _) = line(grid.n_t, grid.ht(), false, 0.0);
    TensorFactors {
        stiffness_s,
        mass_s,
        potential_s,
        stiffness_t,
        mass_t,
    }
}

/// Ground eigenvalue of linear elements for `-v''` on `(0, 1)` with `n_t` uniform nodes,
/// Dirichlet at 0 and free at 1: `(6/h^2) (1 - cos(kh)) / (2 + cos(kh))`, `k = pi/2`.
///
/// The continuum eigenfunction `sin(kt)` is also the discrete one on a uniform grid,
/// so this is exact for the assembled matrices.
pub fn discrete_dn_ground(n_t: usize) -> f64 {
    let h = 1.0 / (n_t - 1) as f64;
    let c = (std::f64::consts::FRAC_PI_2 * h).cos();
    6.0 / (h * h) * (1.0 - c) / (2.0 + c)
}

/// `j`-th (1-based) eigenvalue of linear elements for `-u''` on `(-L, L)` with Dirichlet
/// ends and `n_s` uniform nodes.
pub fn discrete_dirichlet_line(j: usize, half_length: f64, n_s: usize) -> f64 {
    let h = 2.0 * half_length / (n_s - 1) as f64;
    let c = (j as f64 * std::f64::consts::PI * h / (2.0 * half_length)).cos();
    6.0 / (h * h) * (1.0 - c) / (2.0 + c)
}

/// Mass matrix with weight `rho(s) = 1 / (1 + (s - center)^2)`, optionally times `f_eps`.
pub fn assemble_hardy_mass(
    grid: GridSpec,
    weight_center: f64,
    metric: Option<(&StripProfile, f64)>,
) -> Result<CsrMatrix> {
    let coefficients = |s: f64, t: f64| {
        let rho = 1.0 / (1.0 + (s - weight_center).powi(2));
        let f = metric
            .map(|(p, eps)| metric_jet(p, eps, s, t, Scaling::Thin).f)
            .unwrap_or(1.0);
        Coefficients {
            mass: rho * f,
            ..Default::default()
        }
    };
    Ok(assemble_pair(grid, &coefficients, None)?.1)
}
