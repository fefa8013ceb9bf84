//! Word-metric computations on the Cayley graph of G_q: breadth-first
//! balls with exact distances, deterministic geodesic extraction, the
//! recursivity check |tau(g)| <= f(d(1,g)), and the two-sided bound for
//! geodesic selections.

use std::collections::HashMap;

use thiserror::Error;

use crate::group::{normalize, GroupParams, NormalForm};
use crate::word::{Letter, Word, GENERATORS};

/// Default cap on ball size; balls grow polynomially, so radii of
/// interest stay far below this.
pub const DEFAULT_BALL_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricError {
    #[error("ball of radius {radius} exceeds the element budget {budget}")]
    BudgetExceeded { radius: u32, budget: usize },
    #[error("element lies outside the computed ball")]
    OutOfBall,
}

#[derive(Debug, Clone)]
struct BallEntry {
    nf: NormalForm,
    dist: u32,
    /// Index of the BFS parent and the generator stepping parent -> this.
    parent: Option<(usize, Letter)>,
}

/// The ball {g : d(1,g) <= R} with exact distances and deterministic
/// parent links (first discovery under the fixed generator order
/// x, x^-1, y, y^-1, z, z^-1).
#[derive(Debug, Clone)]
pub struct Ball {
    params: GroupParams,
    radius: u32,
    entries: Vec<BallEntry>,
    index: HashMap<NormalForm, usize>,
}

impl Ball {
    pub fn build(params: &GroupParams, radius: u32) -> Result<Ball, MetricError> {
        Self::build_with_budget(params, radius, DEFAULT_BALL_BUDGET)
    }

    pub fn build_with_budget(
        params: &GroupParams,
        radius: u32,
        budget: usize,
    ) -> Result<Ball, MetricError> {
        let mut entries = vec![BallEntry {
            nf: NormalForm::identity(),
            dist: 0,
            parent: None,
        }];
        let mut index = HashMap::new();
        index.insert(NormalForm::identity(), 0usize);

        let mut next = 0usize;
        while next < entries.len() {
            let (g, d) = (entries[next].nf.clone(), entries[next].dist);
            if d == radius {
                break; // frontier is sorted by distance; all later entries are too
            }
            for &l in &GENERATORS {
                let h = g.mul_gen(l, params);
                if !index.contains_key(&h) {
                    if entries.len() >= budget {
                        return Err(MetricError::BudgetExceeded { radius, budget });
                    }
                    index.insert(h.clone(), entries.len());
                    entries.push(BallEntry {
                        nf: h,
                        dist: d + 1,
                        parent: Some((next, l)),
                    });
                }
            }
            next += 1;
        }

        Ok(Ball {
            params: *params,
            radius,
            entries,
            index,
        })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false // the identity is always present
    }

    pub fn contains(&self, g: &NormalForm) -> bool {
        self.index.contains_key(g)
    }

    /// Elements in deterministic BFS order together with their distances.
    pub fn iter(&self) -> impl Iterator<Item = (&NormalForm, u32)> {
        self.entries.iter().map(|e| (&e.nf, e.dist))
    }

    pub fn dist(&self, g: &NormalForm) -> Result<u32, MetricError> {
        self.index
            .get(g)
            .map(|&i| self.entries[i].dist)
            .ok_or(MetricError::OutOfBall)
    }

    /// A geodesic word spelling a shortest path 1 -> g, deterministic via
    /// the BFS parent links.
    pub fn geodesic_word(&self, g: &NormalForm) -> Result<Word, MetricError> {
        let mut i = *self.index.get(g).ok_or(MetricError::OutOfBall)?;
        let mut letters = Vec::with_capacity(self.entries[i].dist as usize);
        while let Some((p, l)) = self.entries[i].parent {
            letters.push(l);
            i = p;
        }
        letters.reverse();
        Ok(Word::new(letters))
    }

    /// (distance, element count) histogram rows for CSV output.
    pub fn sphere_counts(&self) -> Vec<(u32, usize)> {
        let mut counts = vec![0usize; self.radius as usize + 1];
        for e in &self.entries {
            counts[e.dist as usize] += 1;
        }
        counts.into_iter().enumerate().map(|(d, c)| (d as u32, c)).collect()
    }
}

/// A failure of |tau(g)| <= f(d(1,g)).
#[derive(Debug, Clone)]
pub struct RecursivityViolation {
    pub g: NormalForm,
    pub word_len: i64,
    pub dist: u32,
    pub bound: i64,
}

/// Check the recursivity inequality over the whole radius-R ball;
/// returns all violations (expected: none).
pub fn check_recursive(
    params: &GroupParams,
    radius: u32,
) -> Result<Vec<RecursivityViolation>, MetricError> {
    let ball = Ball::build(params, radius)?;
    let mut violations = Vec::new();
    for (g, d) in ball.iter() {
        let bound = params.recursivity_bound(d as i64);
        if g.word_len() > bound {
            violations.push(RecursivityViolation {
                g: g.clone(),
                word_len: g.word_len(),
                dist: d,
                bound,
            });
        }
    }
    Ok(violations)
}

/// A failure of the two-sided bound for the BFS geodesic selection:
/// d(sigma(1,h)(t), sigma(a,hb)(t)) <= (|sigma(1,h)| + |sigma(a,hb)|)/2 + 1.
#[derive(Debug, Clone)]
pub struct GeodesicViolation {
    pub h: NormalForm,
    pub a: Option<Letter>,
    pub b: Option<Letter>,
    pub t: u32,
    /// Exact distance between the two time-t points.
    pub distance: u32,
    /// Sum |sigma| + |sigma'|; the bound is (sum)/2 + 1.
    pub len_sum: u32,
}

/// Sweep the equivariant geodesic selection derived from BFS parent
/// links over the radius-R ball: for every h in the ball and all
/// a, b in the generators plus the identity with a^-1 h b still in the
/// ball, verify the two-sided bound at every integer time.
pub fn check_geodesic_two_sided(
    params: &GroupParams,
    radius: u32,
) -> Result<Vec<GeodesicViolation>, MetricError> {
    let ball = Ball::build(params, radius)?;
    // Distances between swept points never need to exceed radius + 1 when
    // the bound holds; a lookup miss in this larger ball is a violation.
    let oracle = Ball::build(params, radius + 1)?;

    let mut steps: Vec<Option<Letter>> = vec![None];
    steps.extend(GENERATORS.iter().copied().map(Some));

    let mut violations = Vec::new();
    for (h, _) in ball.iter() {
        let path_a = geodesic_points(&ball, h, None, params)?;
        for &a in &steps {
            for &b in &steps {
                let mut target = match a {
                    Some(l) => {
                        let mut t = NormalForm::identity();
                        t.push_gen(l.inverse(), params);
                        t.mul(h, params)
                    }
                    None => h.clone(),
                };
                if let Some(l) = b {
                    target.push_gen(l, params);
                }
                if !ball.contains(&target) {
                    continue; // endpoints must lie in the swept ball
                }
                let path_b = geodesic_points(&ball, &target, a, params)?;
                let len_sum = (path_a.len() + path_b.len() - 2) as u32;
                let horizon = path_a.len().max(path_b.len()) - 1;
                for t in 0..=horizon {
                    let u = point(&path_a, t);
                    let v = point(&path_b, t);
                    let conn = u.inverse(params).mul(v, params);
                    // 2*d <= len_sum + 2, checked in integers.
                    let ok = match oracle.dist(&conn) {
                        Ok(d) => 2 * d <= len_sum + 2,
                        Err(_) => false,
                    };
                    if !ok {
                        violations.push(GeodesicViolation {
                            h: h.clone(),
                            a,
                            b,
                            t: t as u32,
                            distance: oracle.dist(&conn).unwrap_or(radius + 2),
                            len_sum,
                        });
                    }
                }
            }
        }
    }
    Ok(violations)
}

/// Vertex sequence of the selected geodesic from `base` (identity or a
/// single generator a) to base * tau, i.e. the path a * geodesic(target).
fn geodesic_points(
    ball: &Ball,
    target: &NormalForm,
    base: Option<Letter>,
    params: &GroupParams,
) -> Result<Vec<NormalForm>, MetricError> {
    let word = ball.geodesic_word(target)?;
    let mut cur = match base {
        Some(l) => normalize(&Word::new(vec![l]), params),
        None => NormalForm::identity(),
    };
    let mut points = Vec::with_capacity(word.len() + 1);
    points.push(cur.clone());
    for &l in word.letters() {
        cur.push_gen(l, params);
        points.push(cur.clone());
    }
    Ok(points)
}

fn point(points: &[NormalForm], t: usize) -> &NormalForm {
    &points[t.min(points.len() - 1)]
}
