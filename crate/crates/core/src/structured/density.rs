use std::sync::Arc;

use num_traits::{One, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::matroid::{decompose_point, density, parallel_classes, ConvexCombination, Matroid, Multigraph};
use crate::ocrs::{GreedyFamily, Scheme, SubsetFamily};
use crate::rational::Rational;

/// Samples `I₀` from a convex combination of independent sets with marginals `1/γ(M)`;
/// `F = 2^{I₀}`.
#[derive(Clone, Debug)]
pub struct LowDensityScheme {
    pub density: Rational,
    pub combination: ConvexCombination,
    n: usize,
}

pub fn low_density_prepare(m: &Matroid) -> Result<LowDensityScheme> {
    let gamma = density(m)?;
    let share = Rational::one() / &gamma;
    let mut y = vec![Rational::zero(); m.id_space()];
    for e in m.elements() {
        y[e] = share.clone();
    }
    let combination = decompose_point(m, &y)?;
    Ok(LowDensityScheme { density: gamma, combination, n: m.id_space() })
}

impl LowDensityScheme {
    /// `Pr[i ∈ I₀]`, equal to `1/γ` on every element.
    pub fn inclusion(&self) -> Vec<Rational> {
        self.combination.marginals(self.n)
    }
}

impl Scheme for LowDensityScheme {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn realize(&self, rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily> {
        Arc::new(SubsetFamily::new(self.n, self.combination.sample(rng)))
    }

    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>> {
        Ok(self
            .combination
            .terms()
            .iter()
            .map(|(set, w)| (Arc::new(SubsetFamily::new(self.n, set)) as Arc<dyn GreedyFamily>, w.clone()))
            .collect())
    }
}

/// `F = {I : at most one element per parallel class, each parallel to a member of I₀}`.
#[derive(Clone, Debug)]
pub struct ClassFamily {
    class_of: Vec<Option<usize>>,
    representative_kept: Vec<bool>,
}

impl GreedyFamily for ClassFamily {
    fn ground_size(&self) -> usize {
        self.class_of.len()
    }

    fn contains(&self, set: &[usize]) -> bool {
        let mut seen = vec![false; self.representative_kept.len()];
        set.iter().all(|&e| match self.class_of[e] {
            Some(c) if self.representative_kept[c] && !seen[c] => {
                seen[c] = true;
                true
            }
            _ => false,
        })
    }

    fn always_extends(&self, active: &[usize], item: usize) -> bool {
        let Some(c) = self.class_of[item] else { return false };
        self.representative_kept[c] && !active.iter().any(|&e| e != item && self.class_of[e] == Some(c))
    }

    fn extending(&self, active: &[usize]) -> Vec<bool> {
        let mut load = vec![0usize; self.representative_kept.len()];
        for &e in active {
            if let Some(c) = self.class_of[e] {
                load[c] += 1;
            }
        }
        active
            .iter()
            .map(|&e| self.class_of[e].is_some_and(|c| self.representative_kept[c] && load[c] == 1))
            .collect()
    }
}

/// Low-density scheme on one representative per parallel class, lifted to whole classes.
#[derive(Clone, Debug)]
pub struct CographicScheme {
    pub classes: Vec<Vec<usize>>,
    pub representatives: LowDensityScheme,
    class_of: Vec<Option<usize>>,
}

/// Works on any loopless matroid; for cographic inputs use [`cographic_prepare`], which also
/// checks the degree condition that bounds the density by 3.
pub fn parallel_class_prepare(m: &Matroid) -> Result<CographicScheme> {
    let classes = parallel_classes(m)?;
    let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
    let reduced = m.restrict(&reps)?;
    let representatives = low_density_prepare(&reduced)?;
    let mut class_of = vec![None; m.id_space()];
    for (c, members) in classes.iter().enumerate() {
        for &e in members {
            class_of[e] = Some(c);
        }
    }
    Ok(CographicScheme { classes, representatives, class_of })
}

/// Cographic matroid of `graph`: parallel classes are series classes of the graph; after
/// keeping one edge per class the contracted graph must have minimum degree 3.
pub fn cographic_prepare(graph: Multigraph) -> Result<CographicScheme> {
    let m = Matroid::cographic(graph.clone())?;
    let classes = parallel_classes(&m)?;
    let others: Vec<usize> = classes.iter().flat_map(|c| c[1..].iter().copied()).collect();
    let reduced = graph.contract_edges(&others);
    if let Some((vertex, &degree)) = reduced.degrees().iter().enumerate().find(|(_, &d)| d < 3) {
        return Err(Error::LowDegree { vertex, degree });
    }
    parallel_class_prepare(&m)
}

impl Scheme for CographicScheme {
    fn ground_size(&self) -> usize {
        self.class_of.len()
    }

    fn realize(&self, rng: &mut dyn RngCore) -> Arc<dyn GreedyFamily> {
        Arc::new(self.lift(self.representatives.combination.sample(rng)))
    }

    fn realizations(&self) -> Result<Vec<(Arc<dyn GreedyFamily>, Rational)>> {
        Ok(self
            .representatives
            .combination
            .terms()
            .iter()
            .map(|(set, w)| (Arc::new(self.lift(set)) as Arc<dyn GreedyFamily>, w.clone()))
            .collect())
    }
}

impl CographicScheme {
    fn lift(&self, kept_reps: &[usize]) -> ClassFamily {
        let mut representative_kept = vec![false; self.classes.len()];
        for &r in kept_reps {
            if let Some(c) = self.class_of[r] {
                representative_kept[c] = true;
            }
        }
        ClassFamily { class_of: self.class_of.clone(), representative_kept }
    }
}
