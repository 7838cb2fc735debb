//! Relatively parallel frames along a curve and the strip embedding they carry.
//!
//! The frame `{T, N_1, ..., N_n}` of a unit-speed curve `Gamma` in `R^{n+1}` solves
//! `Gamma' = T`, `T' = sum_j k_j N_j`, `N_j' = -k_j T`. The strip is the image of
//! `L(s, t) = Gamma(s) + eps t N_Theta(s)` with `N_Theta = sum_j Theta_j N_j`.

use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::profiles::StripProfile;

/// Position and frame at one arclength sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSample {
    pub s: f64,
    pub position: Vec<f64>,
    pub tangent: Vec<f64>,
    pub normals: Vec<Vec<f64>>,
}

/// Starting point and orthonormal frame `[T, N_1, ..., N_n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialFrame {
    pub position: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl InitialFrame {
    /// Origin with the standard basis of `R^{n+1}`.
    pub fn standard(n: usize) -> Self {
        let d = n + 1;
        let vectors = (0..d)
            .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self {
            position: vec![0.0; d],
            vectors,
        }
    }
}

/// Integrated frame samples on a uniform grid.
#[derive(Debug, Clone)]
pub struct FrameTrack {
    pub samples: Vec<FrameSample>,
    pub step: f64,
    /// Largest `|<e_i, e_j> - delta_ij|` seen before any re-orthonormalization.
    pub max_drift: f64,
}

impl FrameTrack {
    pub fn codimension(&self) -> usize {
        self.samples[0].normals.len()
    }
}

const REORTHONORMALIZE_EVERY: usize = 1000;

/// Integrates the frame equations with classical RK4 at fixed step.
///
/// `curvatures(s)` returns `(k_1, ..., k_n)`. The grid covers `s_range` with the
/// largest step not exceeding `step` that divides the interval evenly.
pub fn integrate_frame(
    curvatures: &dyn Fn(f64) -> Vec<f64>,
    s_range: (f64, f64),
    step: f64,
    initial: &InitialFrame,
) -> Result<FrameTrack> {
    let d = initial.position.len();
    if d < 2 || initial.vectors.len() != d || initial.vectors.iter().any(|v| v.len() != d) {
        return Err(Error::Dimension(format!(
            "initial frame must hold {d} vectors of length {d}"
        )));
    }
    if gram_drift(&initial.vectors) > 1e-12 {
        return Err(invalid("initial_frame", "not orthonormal within 1e-12"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(invalid("step", format!("must be positive, got {step}")));
    }
    let (a, b) = s_range;
    if !(b > a && a.is_finite() && b.is_finite()) {
        return Err(invalid("s_range", format!("empty interval ({a}, {b})")));
    }
    let n = d - 1;
    let steps = ((b - a) / step).ceil() as usize;
    let h = (b - a) / steps as f64;

    let mut y: Vec<f64> = initial.position.clone();
    for v in &initial.vectors {
        y.extend_from_slice(v);
    }
    let rhs = |s: f64, y: &[f64]| -> Result<Vec<f64>> {
        let k = curvatures(s);
        if k.len() != n {
            return Err(Error::Dimension(format!(
                "expected {n} curvatures, got {}",
                k.len()
            )));
        }
        if let Some(bad) = k.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: if bad == 0 {
                    "curvature k_1"
                } else {
                    "curvature k_j"
                },
                s,
            });
        }
        let mut dy = vec![0.0; y.len()];
        let t = &y[d..2 * d];
        dy[..d].copy_from_slice(t);
        for j in 0..n {
            let nj = &y[(2 + j) * d..(3 + j) * d];
            for c in 0..d {
                dy[d + c] += k[j] * nj[c];
                dy[(2 + j) * d + c] = -k[j] * t[c];
            }
        }
        Ok(dy)
    };

    let mut samples = Vec::with_capacity(steps + 1);
    let mut max_drift = 0.0f64;
    let unpack = |s: f64, y: &[f64]| FrameSample {
        s,
        position: y[..d].to_vec(),
        tangent: y[d..2 * d].to_vec(),
        normals: (0..n)
            .map(|j| y[(2 + j) * d..(3 + j) * d].to_vec())
            .collect(),
    };
    samples.push(unpack(a, &y));
    for i in 0..steps {
        let s = a + i as f64 * h;
        let k1 = rhs(s, &y)?;
        let k2 = rhs(s + 0.5 * h, &shifted(&y, &k1, 0.5 * h))?;
        let k3 = rhs(s + 0.5 * h, &shifted(&y, &k2, 0.5 * h))?;
        let k4 = rhs(s + h, &shifted(&y, &k3, h))?;
        for c in 0..y.len() {
            y[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        let vectors: Vec<Vec<f64>> = (0..d)
            .map(|r| y[(1 + r) * d..(2 + r) * d].to_vec())
            .collect();
        max_drift = max_drift.max(gram_drift(&vectors));
        if (i + 1) % REORTHONORMALIZE_EVERY == 0 {
            let q = modified_gram_schmidt(vectors);
            for (r, v) in q.iter().enumerate() {
                y[(1 + r) * d..(2 + r) * d].copy_from_slice(v);
            }
        }
        let s_next = if i + 1 == steps {
            b
        } else {
            a + (i + 1) as f64 * h
        };
        samples.push(unpack(s_next, &y));
    }
    Ok(FrameTrack {
        samples,
        step: h,
        max_drift,
    })
}

fn shifted(y: &[f64], k: &[f64], h: f64) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max |<e_i, e_j> - delta_ij|`.
pub fn gram_drift(vectors: &[Vec<f64>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..vectors.len() {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot(&vectors[i], &vectors[j]) - target).abs());
        }
    }
    worst
}

fn modified_gram_schmidt(mut v: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for i in 0..v.len() {
        for j in 0..i {
            let p = dot(&v[i], &v[j]);
            let vj = v[j].clone();
            v[i].iter_mut().zip(&vj).for_each(|(a, b)| *a -= p * b);
        }
        let norm = dot(&v[i], &v[i]).sqrt();
        v[i].iter_mut().for_each(|a| *a /= norm);
    }
    v
}

/// Frame of a curve realizing a profile: a plane curve with `k_1 = kappa_g` when the
/// profile is untwisted and `n = 1`, otherwise a space curve (`n = 2`) whose curvature
/// vector is aligned with `Theta`.
pub fn frame_for_profile(
    profile: &StripProfile,
    n: usize,
    s_range: (f64, f64),
    step: f64,
) -> Result<FrameTrack> {
    match n {
        1 => {
            if !profile.is_untwisted() {
                return Err(Error::Unsupported(
                    "a twisted strip needs codimension 2".into(),
                ));
            }
            integrate_frame(
                &|s| vec![profile.kappa(s)],
                s_range,
                step,
                &InitialFrame::standard(1),
            )
        }
        2 => {
            profile.angle(0.0)?;
            integrate_frame(
                &|s| {
                    profile
                        .frame_curvatures(s)
                        .map(|k| k.to_vec())
                        .unwrap_or_default()
                },
                s_range,
                step,
                &InitialFrame::standard(2),
            )
        }
        _ => Err(Error::Unsupported(format!(
            "embeddings are available for n = 1, 2, not n = {n}"
        ))),
    }
}

/// One point of the strip.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSample {
    pub s: f64,
    pub t: f64,
    pub point: Vec<f64>,
}

/// Strip points on the tensor grid of frame samples times `t_j = j / (n_t - 1)`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub epsilon: f64,
    pub s: Vec<f64>,
    pub t: Vec<f64>,
    points: Vec<Vec<f64>>,
}

impl Embedding {
    pub fn point(&self, i: usize, j: usize) -> &[f64] {
        &self.points[i * self.t.len() + j]
    }

    pub fn samples(&self) -> impl Iterator<Item = EmbeddingSample> + '_ {
        self.s.iter().enumerate().flat_map(move |(i, &s)| {
            self.t
                .iter()
                .enumerate()
                .map(move |(j, &t)| EmbeddingSample {
                    s,
                    t,
                    point: self.point(i, j).to_vec(),
                })
        })
    }

    /// One point per line, three whitespace-separated coordinates (planar strips
    /// are padded with a zero).
    pub fn write_xyz(&self, out: &mut impl Write) -> std::io::Result<()> {
        for p in &self.points {
            let z = p.get(2).copied().unwrap_or(0.0);
            writeln!(out, "{} {} {}", p[0], p[1], z)?;
        }
        Ok(())
    }
}

/// `L(s, t) = Gamma(s) + eps t N_Theta(s)` on the frame grid.
pub fn embed(
    profile: &StripProfile,
    frame: &FrameTrack,
    eps: f64,
    t_samples: usize,
) -> Result<Embedding> {
    if !(eps > 0.0) {
        return Err(invalid("epsilon", "must be positive"));
    }
    if t_samples < 2 {
        return Err(Error::GridTooCoarse("need at least two t samples".into()));
    }
    let n = frame.codimension();
    let direction = |fs: &FrameSample| -> Result<Vec<f64>> {
        match n {
            1 => {
                if !profile.is_untwisted() {
                    return Err(Error::Unsupported(
                        "twisted profile on a planar frame".into(),
                    ));
                }
                Ok(fs.normals[0].clone())
            }
            2 => {
                let th = profile.angle(fs.s)?;
                let (c, s) = (th.cos(), th.sin());
                Ok(fs.normals[0]
                    .iter()
                    .zip(&fs.normals[1])
                    .map(|(a, b)| c * a + s * b)
                    .collect())
            }
            _ => Err(Error::Unsupported(format!(
                "embeddings are available for n = 1, 2, not n = {n}"
            ))),
        }
    };
    let t: Vec<f64> = (0..t_samples)
        .map(|j| j as f64 / (t_samples - 1) as f64)
        .collect();
    let mut points = Vec::with_capacity(frame.samples.len() * t_samples);
    for fs in &frame.samples {
        let nt = direction(fs)?;
        for &tj in &t {
            if tj == 0.0 {
                points.push(fs.position.clone());
            } else {
                points.push(
                    fs.position
                        .iter()
                        .zip(&nt)
                        .map(|(g, v)| g + eps * tj * v)
                        .collect(),
                );
            }
        }
    }
    Ok(Embedding {
        epsilon: eps,
        s: frame.samples.iter().map(|f| f.s).collect(),
        t,
        points,
    })
}

/// Central-difference first fundamental form at interior grid point `(i, j)`.
pub fn first_fundamental_form(emb: &Embedding, i: usize, j: usize) -> Result<[[f64; 2]; 2]> {
    let (ns, nt) = (emb.s.len(), emb.t.len());
    if i == 0 || j == 0 || i + 1 >= ns || j + 1 >= nt {
        return Err(invalid(
            "grid point",
            format!("({i}, {j}) is not interior to the {ns} x {nt} grid"),
        ));
    }
    let hs = emb.s[i + 1] - emb.s[i - 1];
    let ht = emb.t[j + 1] - emb.t[j - 1];
    let ls: Vec<f64> = emb
        .point(i + 1, j)
        .iter()
        .zip(emb.point(i - 1, j))
        .map(|(a, b)| (a - b) / hs)
        .collect();
    let lt: Vec<f64> = emb
        .point(i, j + 1)
        .iter()
        .zip(emb.point(i, j - 1))
        .map(|(a, b)| (a - b) / ht)
        .collect();
    let g12 = dot(&ls, &lt);
    Ok([[dot(&ls, &ls), g12], [g12, dot(&lt, &lt)]])
}
