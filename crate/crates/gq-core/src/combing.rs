//! The normal-form bicombing of G_q: the line from g to h spells the
//! canonical word of g^-1 h starting at g (equivariant translation of
//! the lines from the identity). Narrow shape is the statement that two
//! lines whose endpoints differ by at most one generator stay within
//! combing distance max((|sigma| + |sigma'|)/k, M/2) at all integer
//! times, with M = 24q + 18 and k = 11/5; all checks here are exact
//! integer arithmetic (distance * 11 <= sum * 5, or 2 * distance <= M).

use thiserror::Error;

use crate::group::{GroupParams, NormalForm};
use crate::metric::{Ball, MetricError};
use crate::word::{Letter, GENERATORS};

/// One step of a combing path: a generator edge or a pause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Move(Letter),
    Pause,
}

/// A based edge-path evaluable at integer times. Vertices reached at
/// every time are cached at construction, so evaluation is a lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombingPath {
    base: NormalForm,
    steps: Vec<Step>,
    points: Vec<NormalForm>,
}

impl CombingPath {
    pub fn new(base: NormalForm, steps: Vec<Step>, params: &GroupParams) -> Self {
        let mut points = Vec::with_capacity(steps.len() + 1);
        points.push(base.clone());
        let mut cur = base.clone();
        for &s in &steps {
            if let Step::Move(l) = s {
                cur.push_gen(l, params);
            }
            points.push(cur.clone());
        }
        CombingPath { base, steps, points }
    }

    pub fn base(&self) -> &NormalForm {
        &self.base
    }

    pub fn endpoint(&self) -> &NormalForm {
        self.points.last().unwrap()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Pause-aware length: the index of the last non-pause step (0 for
    /// the constant path), counting pauses that occur before the end.
    pub fn len(&self) -> u32 {
        self.steps
            .iter()
            .rposition(|s| matches!(s, Step::Move(_)))
            .map_or(0, |i| i as u32 + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The combing line sigma(g, h) = g * sigma(1, g^-1 h): base g, steps
/// spelling the canonical word of g^-1 h. Empty exactly when g = h.
pub fn combing_line(g: &NormalForm, h: &NormalForm, params: &GroupParams) -> CombingPath {
    let conn = g.inverse(params).mul(h, params);
    let steps = conn
        .to_word()
        .letters()
        .iter()
        .map(|&l| Step::Move(l))
        .collect();
    CombingPath::new(g.clone(), steps, params)
}

/// Vertex of the path at integer time t (constant beyond the end).
pub fn path_point(path: &CombingPath, t: u32) -> &NormalForm {
    let i = (t as usize).min(path.points.len() - 1);
    &path.points[i]
}

/// Length of the combing line between the time-t vertices of two paths,
/// |tau(A(t)^-1 B(t))|.
pub fn combing_distance(pa: &CombingPath, pb: &CombingPath, t: u32, params: &GroupParams) -> u32 {
    let u = path_point(pa, t);
    let v = path_point(pb, t);
    u.inverse(params).mul(v, params).word_len() as u32
}

/// The maximal combing distance between two paths over integer times in
/// [0, max(|pa|, |pb|)]; beyond that both paths are constant.
pub fn max_combing_distance(pa: &CombingPath, pb: &CombingPath, params: &GroupParams) -> u32 {
    let horizon = pa.len().max(pb.len());
    (0..=horizon)
        .map(|t| combing_distance(pa, pb, t, params))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CombingError {
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A failure of the narrow-shape inequality.
#[derive(Debug, Clone)]
pub struct NarrowViolation {
    pub h: NormalForm,
    pub a: Option<Letter>,
    pub b: Option<Letter>,
    pub t: u32,
    pub distance: u32,
    pub len_sum: u32,
}

/// Worst combing distance observed for one (a, b) perturbation class,
/// with the witnessing base point and time.
#[derive(Debug, Clone)]
pub struct NarrowWitness {
    pub a: Option<Letter>,
    pub b: Option<Letter>,
    pub h: NormalForm,
    pub t: u32,
    pub distance: u32,
    pub len_sum: u32,
}

#[derive(Debug, Clone)]
pub struct NarrowReport {
    pub radius: u32,
    pub elements: usize,
    pub violations: Vec<NarrowViolation>,
    /// One entry per (a, b) pair in sweep order (49 entries).
    pub witnesses: Vec<NarrowWitness>,
}

impl NarrowReport {
    /// Max distance over the classes with a = 1 and b among the given steps.
    pub fn max_distance_for(&self, bs: &[Option<Letter>]) -> u32 {
        self.witnesses
            .iter()
            .filter(|w| w.a.is_none() && bs.contains(&w.b))
            .map(|w| w.distance)
            .max()
            .unwrap_or(0)
    }
}

/// Exact narrow-shape sweep. By equivariance it suffices to base one
/// path at the identity: for every h in the radius-R ball and all
/// a, b in the generators plus the identity, with pa = sigma(1, h) and
/// pb = sigma(a, h b), verify at every integer time t that
/// combing_distance <= max((|pa| + |pb|)/k, M/2).
pub fn check_narrow_shape(params: &GroupParams, radius: u32) -> Result<NarrowReport, CombingError> {
    let ball = Ball::build(params, radius)?;
    let m = params.narrow_m() as u32;

    let mut steps: Vec<Option<Letter>> = vec![None];
    steps.extend(GENERATORS.iter().copied().map(Some));

    let mut violations = Vec::new();
    let mut witnesses: Vec<NarrowWitness> = steps
        .iter()
        .flat_map(|&a| {
            steps.iter().map(move |&b| NarrowWitness {
                a,
                b,
                h: NormalForm::identity(),
                t: 0,
                distance: 0,
                len_sum: 0,
            })
        })
        .collect();

    for (h, _) in ball.iter() {
        let id = NormalForm::identity();
        let pa = combing_line(&id, h, params);
        for (ai, &a) in steps.iter().enumerate() {
            let base = match a {
                Some(l) => id.mul_gen(l, params),
                None => id.clone(),
            };
            for (bi, &b) in steps.iter().enumerate() {
                let target = match b {
                    Some(l) => h.mul_gen(l, params),
                    None => h.clone(),
                };
                let pb = combing_line(&base, &target, params);
                let len_sum = pa.len() + pb.len();
                let horizon = pa.len().max(pb.len());
                let witness = &mut witnesses[ai * steps.len() + bi];
                for t in 0..=horizon {
                    let d = combing_distance(&pa, &pb, t, params);
                    if d > witness.distance {
                        *witness = NarrowWitness {
                            a,
                            b,
                            h: h.clone(),
                            t,
                            distance: d,
                            len_sum,
                        };
                    }
                    // d <= max(len_sum / k, M / 2) with k = 11/5, exactly.
                    let within_ratio = (d as u64) * GroupParams::K_NUM as u64
                        <= (len_sum as u64) * GroupParams::K_DEN as u64;
                    let within_floor = 2 * d <= m;
                    if !(within_ratio || within_floor) {
                        violations.push(NarrowViolation {
                            h: h.clone(),
                            a,
                            b,
                            t,
                            distance: d,
                            len_sum,
                        });
                    }
                }
            }
        }
    }

    Ok(NarrowReport {
        radius,
        elements: ball.len(),
        violations,
        witnesses,
    })
}
