//! Plot-ready CSV sweeps. Every file starts with `#` comment lines giving the
//! parameters and the column meanings, followed by a CSV header row; values
//! carry 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context};
use pfaffian_core::cone::wedge_product;
use pfaffian_core::random::{trial_rng, unit_rank_two_skew, unit_skew};
use pfaffian_core::slicing::{composite_profile, SecondaryLevel};
use pfaffian_core::tangent::{approach_residual, order_fit, secant_distance, tangent_membership};
use pfaffian_core::VarietySpec;

use crate::suites::{random_query, slope_grid};

#[derive(Debug, Clone, PartialEq)]
pub enum SweepKind {
    /// `w1 w2` along the hyperbola `H_c` in the direction of a random unit `b`.
    Composite { n: usize, r: usize, c: Vec<f64>, seed: u64, t_max: f64, points: usize },
    /// Approach residual (tangent direction) or secant distance (otherwise)
    /// on a log grid in `t`.
    Slope { n: usize, r: usize, k: usize, member: bool, seed: u64 },
    /// `det(I - t A_v)` for `t` from 0 to `x_r`.
    WedgeDet { n: usize, x: Vec<f64>, rank_two: bool, seed: u64, points: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub comments: Vec<String>,
    pub columns: [&'static str; 2],
    pub rows: Vec<[f64; 2]>,
}

impl Sweep {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "# {c}").unwrap();
        }
        writeln!(out, "# columns: {}", self.columns.join(",")).unwrap();
        writeln!(out, "{}", self.columns.join(",")).unwrap();
        for [a, b] in &self.rows {
            writeln!(out, "{a:.16e},{b:.16e}").unwrap();
        }
        out
    }
}

fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points < 2 {
        return vec![lo];
    }
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

pub fn sweep(kind: &SweepKind) -> anyhow::Result<Sweep> {
    match kind {
        SweepKind::Composite { n, r, c, seed, t_max, points } => {
            let spec = VarietySpec::new(*n, *r)?;
            if c.len() != *r {
                bail!("need {r} level labels, got {}", c.len());
            }
            if !(*t_max > 0.0) || *points < 3 {
                bail!("need t_max > 0 and at least 3 points");
            }
            let level = SecondaryLevel::new(c.clone())?;
            let b = unit_skew(spec.normal_size(), &mut trial_rng(*seed, 0));
            let mut grid = uniform_grid(-t_max, *t_max, *points);
            if *points % 2 == 1 {
                grid[points / 2] = 0.0;
            }
            let rows: Vec<[f64; 2]> = composite_profile(&level, &b, &grid)?.into_iter().map(|(t, v)| [t, v]).collect();
            let argmin = rows.iter().min_by(|a, b| a[1].total_cmp(&b[1])).expect("grid nonempty")[0];
            Ok(Sweep {
                comments: vec![
                    format!("composite weight w1*w2 on the level x_i^2 - t^2 = c_i^2; n={n} r={r} c={c:?} seed={seed}"),
                    format!("normal direction b (upper, row-major) = {:?}", b.upper()),
                    format!("grid argmin t = {argmin:.16e}"),
                ],
                columns: ["t", "w1w2"],
                rows,
            })
        }
        SweepKind::Slope { n, r, k, member, seed } => {
            let spec = VarietySpec::new(*n, *r)?;
            if k > r {
                bail!("base half-rank k = {k} exceeds r = {r}");
            }
            let q = random_query(spec, *k, *member, &mut trial_rng(*seed, 0));
            let is_member = tangent_membership(&q, 1e-9);
            let grid = slope_grid();
            let rows = grid
                .iter()
                .map(|&t| {
                    let v = if is_member { approach_residual(&q, t)? } else { secant_distance(&q, t) };
                    Ok([t, v])
                })
                .collect::<anyhow::Result<Vec<_>>>()?;
            let fit = order_fit(&q, &grid, 1e-9);
            let fit_line = match fit {
                Ok(f) => format!("fitted slope = {:.6} constant = {:.6e} over {} points", f.slope, f.constant, f.points),
                Err(e) => format!("fit unavailable: {e}"),
            };
            Ok(Sweep {
                comments: vec![
                    format!("tangent-cone order sweep; n={n} r={r} base rank 2k={} member={is_member} seed={seed}", 2 * k),
                    fit_line,
                    format!("base (upper) = {:?}", q.base.upper()),
                    format!("direction (upper) = {:?}", q.direction.upper()),
                ],
                columns: ["t", if is_member { "residual" } else { "distance" }],
                rows,
            })
        }
        SweepKind::WedgeDet { n, x, rank_two, seed, points } => {
            let r = x.len();
            VarietySpec::new(*n, r)?;
            pfaffian_core::cone::check_chamber(x)?;
            if *points < 2 {
                bail!("need at least 2 points");
            }
            let m = n - 2 * r;
            let mut rng = trial_rng(*seed, 0);
            let b = if *rank_two { unit_rank_two_skew(m, &mut rng) } else { unit_skew(m, &mut rng) };
            let rows = uniform_grid(0.0, x[r - 1], *points).into_iter().map(|t| [t, wedge_product(x, t, &b)]).collect();
            Ok(Sweep {
                comments: vec![
                    format!("wedge determinant det(I - t A_v); n={n} x={x:?} rank_two={rank_two} seed={seed}"),
                    format!("normal direction b (upper, row-major) = {:?}", b.upper()),
                    format!("t runs to the focal radius x_r = {:.16e}", x[r - 1]),
                ],
                columns: ["t", "det"],
                rows,
            })
        }
    }
}

pub fn emit_sweep(kind: &SweepKind, path: &Path) -> anyhow::Result<Sweep> {
    let s = sweep(kind)?;
    fs::write(path, s.to_csv()).with_context(|| format!("writing {}", path.display()))?;
    Ok(s)
}
