use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ExhaustionGenerator, VertexFn};
use crate::harmonic::dirichlet::harmonic_extension;
use crate::potential::{UtReport, UtVerdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiouvilleTrend {
    LiouvilleTrend,
    NonLiouvilleTrend,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiouvilleReport {
    pub verdict: LiouvilleTrend,
    pub levels: Vec<usize>,
    /// Oscillation of the harmonic extension over the level-1 ball.
    pub oscillation: Vec<f64>,
    /// Boundary value assigned to each sector.
    pub sector_signs: Vec<f64>,
    pub seed: u64,
}

/// `±1` per sector from the seed alone, with both signs present.
fn sector_signs(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs: Vec<f64> = (0..count)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    if count > 1 && signs.iter().all(|&s| s == signs[0]) {
        signs[count - 1] = -signs[0];
    }
    signs
}

/// Harmonic extensions of sector-wise `±1` shell data at each level. A
/// vanishing oscillation near the root suggests finite-energy harmonic
/// functions are constant; a persistent one exhibits a non-constant
/// bounded harmonic limit.
pub fn liouville_probe(
    gen: &ExhaustionGenerator,
    levels: &[usize],
    seed: u64,
) -> Result<LiouvilleReport> {
    if levels.len() < 3 || levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "need at least three positive, strictly increasing levels".into(),
        ));
    }
    let signs = sector_signs(gen.sector_count(), seed);
    let core: Vec<String> = gen.level(1)?.labels().to_vec();
    let mut oscillation = Vec::with_capacity(levels.len());
    for &n in levels {
        let s = gen.level(n)?;
        let sectors = gen.sectors(&s);
        let mut data = VertexFn::zeros(s.len());
        for v in s.masked() {
            data[v] = signs[sectors[v] % signs.len()];
        }
        let f = harmonic_extension(&s, &data)?;
        let (lo, hi) = core
            .iter()
            .filter_map(|label| s.vertex(label))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(f[v]), hi.max(f[v]))
            });
        oscillation.push(hi - lo);
    }
    Ok(LiouvilleReport {
        verdict: judge(&oscillation),
        levels: levels.to_vec(),
        oscillation,
        sector_signs: signs,
        seed,
    })
}

fn judge(osc: &[f64]) -> LiouvilleTrend {
    let k = osc.len();
    let (first, prev, last) = (osc[0], osc[k - 2], osc[k - 1]);
    let settling = osc[k - 3..].windows(2).all(|w| w[1] <= w[0]);
    if last < 0.1 * first && settling {
        LiouvilleTrend::LiouvilleTrend
    } else if (last - prev).abs() <= 0.1 * prev && last > 0.05 {
        LiouvilleTrend::NonLiouvilleTrend
    } else {
        LiouvilleTrend::Inconclusive
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OnePointDiagnosis {
    pub ut_verdict: UtVerdict,
    pub liouville: LiouvilleTrend,
    pub consistent: bool,
    pub statement: String,
}

/// Uniform transience together with the Liouville trend is the computable
/// surrogate for a one-point Royden compactification.
pub fn one_point_diagnosis(ut: &UtReport, probe: &LiouvilleReport) -> OnePointDiagnosis {
    let consistent =
        ut.verdict == UtVerdict::CertifiedUt && probe.verdict == LiouvilleTrend::LiouvilleTrend;
    let statement = if consistent {
        "consistent with one-point Royden compactification".to_string()
    } else {
        "no evidence for a one-point Royden compactification".to_string()
    };
    OnePointDiagnosis {
        ut_verdict: ut.verdict,
        liouville: probe.verdict,
        consistent,
        statement,
    }
}
