//! Sup, sampled Hölder and boundary `H⁻²` norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{Chart, GridField};
use crate::spectral::dft_scaled;

/// Which node pairs the Hölder seminorm is sampled on: axis-neighbour pairs at
/// dyadic separations plus a seeded list of random pairs. The random list is
/// generated before filtering, so a longer list extends a shorter one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PairPlan {
    pub seed: u64,
    pub random_pairs: usize,
    pub dyadic: bool,
}

impl Default for PairPlan {
    fn default() -> Self {
        PairPlan {
            seed: 0x5eed,
            random_pairs: 100_000,
            dyadic: true,
        }
    }
}

/// A plan resolved on a chart: node index pairs and their distances.
#[derive(Clone, Debug)]
pub struct ResolvedPairs {
    plan: PairPlan,
    shape: (usize, usize),
    tag: u32,
    pairs: Vec<(u32, u32)>,
    dist: Vec<f64>,
}

impl ResolvedPairs {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    pub fn plan(&self) -> &PairPlan {
        &self.plan
    }
}

impl PairPlan {
    /// Pairs restricted to physical distance at least one cell of `chart`.
    pub fn resolve(&self, chart: &Chart) -> Result<ResolvedPairs> {
        let (n, m) = chart.shape();
        let pos = chart.positions();
        let min_dist = chart.cell_size() * (1.0 - 1e-9);
        let periodic = true;
        let mut pairs = Vec::new();
        let mut dist = Vec::new();
        let mut push = |a: usize, b: usize| {
            let d = (pos[a][0] - pos[b][0]).hypot(pos[a][1] - pos[b][1]);
            if d >= min_dist {
                pairs.push((a as u32, b as u32));
                dist.push(d);
            }
        };
        if self.dyadic {
            let mut step = 1;
            while step < n {
                for i in 0..n - step {
                    for j in 0..m {
                        push(i * m + j, (i + step) * m + j);
                    }
                }
                step *= 2;
            }
            let mut step = 1;
            while periodic && step <= m / 2 {
                for i in 0..n {
                    for j in 0..m {
                        push(i * m + j, i * m + (j + step) % m);
                    }
                }
                step *= 2;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let total = n * m;
        for _ in 0..self.random_pairs {
            let a = rng.gen_range(0..total);
            let b = rng.gen_range(0..total);
            push(a, b);
        }
        if pairs.is_empty() {
            return Err(Error::Precondition("pair plan selects no pairs on this grid".into()));
        }
        Ok(ResolvedPairs {
            plan: *self,
            shape: (n, m),
            tag: chart.tag(),
            pairs,
            dist,
        })
    }
}

/// Sampled `C^{0,α}` norm: a lower bound of the true norm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub alpha: f64,
    #[serde(rename = "sup")]
    pub sup_norm: f64,
    pub seminorm: f64,
    pub plan_seed: u64,
    pub pair_count: usize,
}

impl HolderEstimate {
    pub fn norm(&self) -> f64 {
        self.sup_norm + self.seminorm
    }
}

pub fn holder_norm(f: &GridField, alpha: f64, plan: &PairPlan) -> Result<HolderEstimate> {
    let pairs = plan.resolve(f.chart())?;
    holder_norm_with(f, alpha, &pairs)
}

/// Hölder norm on pairs resolved once and shared between fields.
pub fn holder_norm_with(f: &GridField, alpha: f64, pairs: &ResolvedPairs) -> Result<HolderEstimate> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Range {
            what: "alpha",
            value: alpha,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if pairs.shape != f.shape() || pairs.tag != f.chart().tag() {
        return Err(Error::Shape("pair plan was resolved on a different grid".into()));
    }
    if pairs.is_empty() {
        return Err(Error::Precondition("empty pair set".into()));
    }
    let comps: Vec<&[f64]> = f
        .comps()
        .iter()
        .map(|c| c.as_slice().expect("fields are stored contiguously"))
        .collect();
    let mut semi: f64 = 0.0;
    for (&(a, b), &d) in pairs.pairs.iter().zip(&pairs.dist) {
        let (a, b) = (a as usize, b as usize);
        let diff = if comps.len() == 1 {
            (comps[0][a] - comps[0][b]).abs()
        } else {
            comps.iter().map(|c| (c[a] - c[b]).powi(2)).sum::<f64>().sqrt()
        };
        semi = semi.max(diff / d.powf(alpha));
    }
    Ok(HolderEstimate {
        alpha,
        sup_norm: f.sup_norm(),
        seminorm: semi,
        plan_seed: pairs.plan.seed,
        pair_count: pairs.len(),
    })
}

/// `H⁻²` norm on the circle `ℝ/Lℤ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegSobolevNorm {
    pub order: i32,
    pub period: f64,
    pub value: f64,
}

/// `(Σ_k (1 + (2πk/L)²)^{−2} |f̂_k|²)^{1/2}` with `f̂ = DFT/N`; the sample count
/// must be a power of two.
pub fn h_minus2_norm(values: &[f64], period: f64) -> Result<f64> {
    let n = values.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::Precondition(format!(
            "H⁻² norm needs a power-of-two sample count, got {n}"
        )));
    }
    let c = dft_scaled(values);
    let w0 = std::f64::consts::TAU / period;
    let sum: f64 = c
        .iter()
        .enumerate()
        .map(|(k, ck)| {
            let kk = k.min(n - k) as f64 * w0;
            ck.norm_sqr() / (1.0 + kk * kk).powi(2)
        })
        .sum();
    Ok(sum.sqrt())
}

pub fn h_minus2(values: &[f64], period: f64) -> Result<NegSobolevNorm> {
    Ok(NegSobolevNorm {
        order: -2,
        period,
        value: h_minus2_norm(values, period)?,
    })
}

/// Largest pointwise Euclidean difference of two fields on a common grid.
pub fn c0_distance(f: &GridField, g: &GridField) -> Result<f64> {
    Ok(f.sub(g)?.sup_norm())
}
