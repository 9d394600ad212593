use serde::Serialize;

use crate::energy::FormMatrix;
use crate::error::{Error, Result};
use crate::graph::Section;
use crate::numerics::{cg_solve, dot, solve_rank_one, CgOptions, RankOneMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaRegime {
    /// Every component involved touches the mask or carries killing.
    Wired,
    /// `x` and `y` share an interior component with neither mask nor
    /// killing; constants drop out of differences and the value is the free
    /// effective resistance inside that component.
    FreeFallback,
    /// A kernel-bearing component was grounded by the `f(o)²` term.
    Anchored,
    /// Some involved component carries a constant that separates `x` from `y`.
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gamma {
    /// `+inf` in the unbounded regime.
    pub value: f64,
    pub squared: f64,
    pub regime: GammaRegime,
}

impl Gamma {
    fn from_squared(squared: f64, regime: GammaRegime) -> Gamma {
        let squared = squared.max(0.0);
        Gamma {
            value: squared.sqrt(),
            squared,
            regime,
        }
    }

    fn unbounded() -> Gamma {
        Gamma {
            value: f64::INFINITY,
            squared: f64::INFINITY,
            regime: GammaRegime::Unbounded,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

fn check_pair(s: &Section, x: usize, y: usize) -> Result<()> {
    s.check_vertex(x)?;
    s.check_vertex(y)?;
    if x == y {
        return Err(Error::SameVertex);
    }
    Ok(())
}

/// Interior components containing `x` or `y`, deduplicated.
fn involved(s: &Section, x: usize, y: usize) -> (crate::graph::Components, Vec<usize>) {
    let comps = s.interior_components();
    let mut ids: Vec<usize> = [x, y]
        .iter()
        .filter_map(|&v| comps.component_of[v])
        .collect();
    ids.dedup();
    (comps, ids)
}

/// `d = e_x − e_y` restricted to the rows of `form`.
fn difference(form: &FormMatrix, x: usize, y: usize) -> Vec<f64> {
    let mut d = vec![0.0; form.dim()];
    if let Some(i) = form.local[x] {
        d[i] += 1.0;
    }
    if let Some(j) = form.local[y] {
        d[j] -= 1.0;
    }
    d
}

/// Resistance between `x` and `y` in the pure edge Laplacian on `members`,
/// which must be closed under adjacency.
fn component_resistance(
    s: &Section,
    members: &[usize],
    x: usize,
    y: usize,
    opts: &CgOptions,
) -> Result<f64> {
    let mut keep = vec![false; s.len()];
    for &v in members {
        keep[v] = v != y;
    }
    let form = FormMatrix::laplacian(s, &keep);
    let i = form.local[x].expect("x lies in the component");
    let mut rhs = vec![0.0; form.dim()];
    rhs[i] = 1.0;
    Ok(cg_solve(&form.matrix, &rhs, opts)?.x[i])
}

/// `γ(x, y) = sup{|φ(x) − φ(y)| : Q̃(φ) ≤ 1}` over functions vanishing on the mask.
pub fn gamma(s: &Section, x: usize, y: usize) -> Result<Gamma> {
    gamma_with(s, x, y, &CgOptions::default())
}

pub fn gamma_with(s: &Section, x: usize, y: usize, opts: &CgOptions) -> Result<Gamma> {
    check_pair(s, x, y)?;
    let (comps, ids) = involved(s, x, y);
    if ids.is_empty() {
        return Ok(Gamma::from_squared(0.0, GammaRegime::Wired));
    }
    if let Some(&free) = ids.iter().find(|&&id| !comps.grounded[id]) {
        let both_inside = ids.len() == 1
            && comps.component_of[x] == Some(free)
            && comps.component_of[y] == Some(free);
        if !both_inside {
            return Ok(Gamma::unbounded());
        }
        let r = component_resistance(s, &comps.members[free], x, y, opts)?;
        return Ok(Gamma::from_squared(r, GammaRegime::FreeFallback));
    }
    let mut keep = vec![false; s.len()];
    for &id in &ids {
        for &v in &comps.members[id] {
            keep[v] = true;
        }
    }
    let form = FormMatrix::new(s, &keep);
    let d = difference(&form, x, y);
    let u = cg_solve(&form.matrix, &d, opts)?.x;
    Ok(Gamma::from_squared(dot(&d, &u), GammaRegime::Wired))
}

/// `γ_o(x, y)`, the same supremum over the unit ball of `‖·‖_o`.
pub fn gamma_o(s: &Section, o: usize, x: usize, y: usize) -> Result<Gamma> {
    gamma_o_with(s, o, x, y, &CgOptions::default(), RankOneMethod::Direct)
}

pub fn gamma_o_with(
    s: &Section,
    o: usize,
    x: usize,
    y: usize,
    opts: &CgOptions,
    method: RankOneMethod,
) -> Result<Gamma> {
    check_pair(s, x, y)?;
    s.check_vertex(o)?;
    let (comps, ids) = involved(s, x, y);
    if ids.is_empty() {
        return Ok(Gamma::from_squared(0.0, GammaRegime::Wired));
    }
    let o_comp = comps.component_of[o];
    if ids
        .iter()
        .any(|&id| !comps.grounded[id] && o_comp != Some(id))
    {
        return Ok(Gamma::unbounded());
    }
    let mut keep = vec![false; s.len()];
    for &id in &ids {
        for &v in &comps.members[id] {
            keep[v] = true;
        }
    }
    let form = FormMatrix::new(s, &keep);
    let d = difference(&form, x, y);
    let regime = if ids.iter().all(|&id| comps.grounded[id]) {
        GammaRegime::Wired
    } else {
        GammaRegime::Anchored
    };
    let u = match form.local[o] {
        Some(i) => {
            // Sherman–Morrison needs A itself to be definite
            let method = if regime == GammaRegime::Wired {
                method
            } else {
                RankOneMethod::Direct
            };
            solve_rank_one(&form.matrix, i, &d, opts, method)?
        }
        None => cg_solve(&form.matrix, &d, opts)?.x,
    };
    Ok(Gamma::from_squared(dot(&d, &u), regime))
}

/// Effective resistance between `x` and `y` in the plain weighted graph:
/// mask and killing are both ignored.
pub fn free_resistance(s: &Section, x: usize, y: usize) -> Result<f64> {
    free_resistance_with(s, x, y, &CgOptions::default())
}

pub fn free_resistance_with(s: &Section, x: usize, y: usize, opts: &CgOptions) -> Result<f64> {
    check_pair(s, x, y)?;
    let comp = s.full_components();
    if comp[x] != comp[y] {
        return Err(Error::DisconnectedPair(x, y));
    }
    let members: Vec<usize> = (0..s.len()).filter(|&v| comp[v] == comp[x]).collect();
    component_resistance(s, &members, x, y, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::RawGraph;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-10
    }

    fn p3_masked() -> Section {
        Section::build(
            &RawGraph::new(3)
                .edge(0, 1, 1.0)
                .edge(1, 2, 1.0)
                .dirichlet(2),
        )
        .unwrap()
    }

    #[test]
    fn unit_edge_free_fallback() {
        let s = Section::build(&RawGraph::new(2).edge(0, 1, 1.0)).unwrap();
        let g = gamma(&s, 0, 1).unwrap();
        assert!(close(g.value, 1.0));
        assert_eq!(g.regime, GammaRegime::FreeFallback);
        let go = gamma_o(&s, 0, 0, 1).unwrap();
        assert!(close(go.value, 1.0));
        assert_eq!(go.regime, GammaRegime::Anchored);
    }

    #[test]
    fn wired_path() {
        let s = p3_masked();
        assert!(close(gamma(&s, 0, 1).unwrap().value, 1.0));
        assert!(close(gamma(&s, 0, 2).unwrap().value, 2f64.sqrt()));
        let g = gamma(&s, 0, 1).unwrap();
        assert_eq!(gamma_o(&s, 2, 0, 1).unwrap(), g);
        for o in 0..3 {
            let go = gamma_o(&s, o, 0, 1).unwrap();
            assert!(go.value <= g.value + 1e-12);
        }
    }

    #[test]
    fn sherman_morrison_agrees() {
        let s = p3_masked();
        let a = gamma_o_with(&s, 0, 0, 1, &CgOptions::default(), RankOneMethod::Direct).unwrap();
        let b = gamma_o_with(
            &s,
            0,
            0,
            1,
            &CgOptions::default(),
            RankOneMethod::ShermanMorrison,
        )
        .unwrap();
        assert!((a.squared - b.squared).abs() < 1e-10);
    }

    #[test]
    fn separated_constant_is_unbounded() {
        // interior {0,1} has no mask and no killing; 2 is an isolated masked vertex
        let s = Section::build(&RawGraph::new(3).edge(0, 1, 1.0).dirichlet(2)).unwrap();
        assert_eq!(gamma(&s, 0, 2).unwrap().regime, GammaRegime::Unbounded);
        assert!(gamma_o(&s, 1, 0, 2).unwrap().is_finite());
        assert!(!gamma_o(&s, 2, 0, 2).unwrap().is_finite());
    }

    #[test]
    fn errors() {
        let s = p3_masked();
        assert_eq!(gamma(&s, 1, 1), Err(Error::SameVertex));
        assert!(matches!(gamma(&s, 0, 9), Err(Error::UnknownVertex(_))));
        let split = Section::build(&RawGraph::new(2)).unwrap();
        assert_eq!(
            free_resistance(&split, 0, 1),
            Err(Error::DisconnectedPair(0, 1))
        );
    }

    #[test]
    fn resistance_examples() {
        let edge = Section::build(&RawGraph::new(2).edge(0, 1, 1.0)).unwrap();
        assert!(close(free_resistance(&edge, 0, 1).unwrap(), 1.0));
        let tri = Section::build(
            &RawGraph::new(3)
                .edge(0, 1, 1.0)
                .edge(1, 2, 1.0)
                .edge(0, 2, 1.0),
        )
        .unwrap();
        for (x, y) in [(0, 1), (1, 2), (0, 2)] {
            assert!(close(free_resistance(&tri, x, y).unwrap(), 2.0 / 3.0));
        }
        let par = Section::build(&RawGraph::new(2).edge(0, 1, 2.0)).unwrap();
        assert!(close(free_resistance(&par, 0, 1).unwrap(), 0.5));
        // the mask is ignored
        assert!(close(free_resistance(&p3_masked(), 0, 2).unwrap(), 2.0));
    }
}
