use serde::Serialize;

use crate::energy::{energy, FormMatrix};
use crate::error::{Error, Result};
use crate::graph::{Section, VertexFn};
use crate::numerics::{cg_solve, CgOptions};

/// Minimiser of `Q̃` among functions with `u(x) = 1` vanishing on the mask.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub potential: VertexFn,
    pub cap: f64,
    /// `x` lies in an interior component with no mask and no killing: the
    /// infimum is attained by the indicator of that component and is zero.
    pub degenerate: bool,
    pub iterations: usize,
}

pub fn equilibrium_potential(s: &Section, x: usize) -> Result<Equilibrium> {
    equilibrium_potential_with(s, x, &CgOptions::default())
}

pub fn equilibrium_potential_with(s: &Section, x: usize, opts: &CgOptions) -> Result<Equilibrium> {
    s.check_vertex(x)?;
    if s.is_masked(x) {
        return Err(Error::NotInterior(x));
    }
    let comps = s.interior_components();
    let id = comps.component_of[x].unwrap();
    let members = &comps.members[id];

    if !comps.grounded[id] {
        let mut u = VertexFn::zeros(s.len());
        for &v in members {
            u[v] = 1.0;
        }
        let cap = energy(s, &u)?.value;
        return Ok(Equilibrium {
            potential: u,
            cap,
            degenerate: true,
            iterations: 0,
        });
    }

    let mut keep = vec![false; s.len()];
    for &v in members {
        keep[v] = v != x;
    }
    let form = FormMatrix::new(s, &keep);
    // pinned u(x) = 1 moves b(v, x) to the right-hand side
    let rhs: Vec<f64> = form.vertices.iter().map(|&v| s.weight(v, x)).collect();
    let out = cg_solve(&form.matrix, &rhs, opts)?;
    let mut u = form.lift(&out.x, s.len());
    u[x] = 1.0;
    let cap = energy(s, &u)?.value;
    Ok(Equilibrium {
        potential: u,
        cap,
        degenerate: false,
        iterations: out.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_tree, RawGraph};

    #[test]
    fn path_grounded_at_one_end() {
        let s = Section::build(
            &RawGraph::new(3)
                .edge(0, 1, 1.0)
                .edge(1, 2, 1.0)
                .dirichlet(2),
        )
        .unwrap();
        let eq = equilibrium_potential(&s, 0).unwrap();
        assert!((eq.cap - 0.5).abs() < 1e-12);
        let want = [1.0, 0.5, 0.0];
        for (got, want) in eq.potential.values().iter().zip(want) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!(!eq.degenerate);
    }

    #[test]
    fn star_centre() {
        let star = generate_tree(3, 1).unwrap();
        let eq = equilibrium_potential(&star, 0).unwrap();
        assert_eq!(eq.potential.values(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(eq.cap, 3.0);
    }

    #[test]
    fn killing_only() {
        let s = Section::build(&RawGraph::new(1).killing(0, 2.0)).unwrap();
        let eq = equilibrium_potential(&s, 0).unwrap();
        assert_eq!(eq.potential.values(), &[1.0]);
        assert_eq!(eq.cap, 2.0);
    }

    #[test]
    fn ungrounded_component_is_flagged() {
        let s = Section::build(&RawGraph::new(3).edge(0, 1, 1.0).edge(1, 2, 1.0)).unwrap();
        let eq = equilibrium_potential(&s, 1).unwrap();
        assert!(eq.degenerate);
        assert_eq!(eq.cap, 0.0);
        assert_eq!(eq.potential.values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn masked_vertex_is_rejected() {
        let s = generate_tree(3, 1).unwrap();
        assert_eq!(equilibrium_potential(&s, 1), Err(Error::NotInterior(1)));
    }
}
