//! Value tables, utilities and the UCB1 rule.

use std::rc::Rc;

use rand::Rng;
use rustc_hash::FxHashMap;

use super::LampConfig;
use crate::landmarks::{LandmarkId, LandmarkSet};
use crate::model::{ActionId, State};

/// `exp(-cost / decay) + k_g * [reached_goal]`.
pub fn gubs_utility(cost: u32, reached_goal: bool, cfg: &LampConfig) -> f64 {
    let u = (-(cost as f64) / cfg.utility_decay).exp();
    if reached_goal {
        u + cfg.k_g
    } else {
        u
    }
}

/// `q + c * sqrt(ln n_s / n_sa)`, or `+inf` for an unvisited arm.
pub fn ucb1(q: f64, n_s: u64, n_sa: u64, c: f64) -> f64 {
    if n_sa == 0 {
        return f64::INFINITY;
    }
    if c == 0.0 {
        return q;
    }
    q + c * ((n_s as f64).ln() / n_sa as f64).sqrt()
}

/// Bandit statistics for the children of one decision node, aligned with
/// the node's candidate list.
#[derive(Debug, Clone, PartialEq)]
pub struct Arms<T> {
    pub ids: Rc<[T]>,
    pub n: u64,
    pub q: Vec<f64>,
    pub count: Vec<u64>,
}

impl<T: PartialEq> Arms<T> {
    pub fn new(ids: Rc<[T]>) -> Self {
        let k = ids.len();
        Arms { ids, n: 0, q: vec![0.0; k], count: vec![0; k] }
    }

    pub fn position(&self, id: &T) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn ucb(&self, i: usize, c: f64) -> f64 {
        ucb1(self.q[i], self.n, self.count[i], c)
    }
}

/// Running-mean update with the utility of `(cost, reached_goal)`, then
/// increments both visit counters.
///
/// Written as `q + (x - q) / (n + 1)`, the same mean as `(n q + x) / (n + 1)`
/// but exact when every sample is equal.
pub fn ucb_update<T>(arms: &mut Arms<T>, i: usize, cost: u32, reached_goal: bool, cfg: &LampConfig) {
    let n = arms.count[i] as f64;
    let x = gubs_utility(cost, reached_goal, cfg);
    arms.q[i] += (x - arms.q[i]) / (1.0 + n);
    arms.n += 1;
    arms.count[i] += 1;
}

/// Index of a maximal value; ties are broken uniformly with `rng`, which
/// is only consulted when there is more than one maximum.
pub fn argmax_random<R: Rng + ?Sized>(values: &[f64], rng: &mut R) -> Option<usize> {
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<usize> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            ties.clear();
            ties.push(i);
        } else if v == best {
            ties.push(i);
        }
    }
    match ties.len() {
        0 => None,
        1 => Some(ties[0]),
        k => Some(ties[rng.random_range(0..k)]),
    }
}

/// The three learned tables. Absent entries read as zero.
#[derive(Debug, Clone, Default)]
pub struct QTables {
    pub goal: FxHashMap<State, Arms<ActionId>>,
    pub landmark: FxHashMap<(LandmarkId, State), Arms<ActionId>>,
    pub selection: FxHashMap<LandmarkSet, Arms<LandmarkId>>,
}

fn read<T: PartialEq>(arms: Option<&Arms<T>>, id: &T) -> (f64, u64) {
    arms.and_then(|a| a.position(id).map(|i| (a.q[i], a.count[i])))
        .unwrap_or((0.0, 0))
}

impl QTables {
    pub fn q_g(&self, s: &State, a: ActionId) -> f64 {
        read(self.goal.get(s), &a).0
    }

    pub fn n_g(&self, s: &State, a: ActionId) -> u64 {
        read(self.goal.get(s), &a).1
    }

    pub fn n_g_state(&self, s: &State) -> u64 {
        self.goal.get(s).map_or(0, |a| a.n)
    }

    pub fn q_phi(&self, l: LandmarkId, s: &State, a: ActionId) -> f64 {
        read(self.landmark.get(&(l, s.clone())), &a).0
    }

    pub fn n_phi(&self, l: LandmarkId, s: &State, a: ActionId) -> u64 {
        read(self.landmark.get(&(l, s.clone())), &a).1
    }

    pub fn q_lm(&self, remaining: &LandmarkSet, l: LandmarkId) -> f64 {
        read(self.selection.get(remaining), &l).0
    }

    pub fn n_lm(&self, remaining: &LandmarkSet, l: LandmarkId) -> u64 {
        read(self.selection.get(remaining), &l).1
    }

    /// Every value in every table, for range checks.
    pub fn all_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.goal
            .values()
            .chain(self.landmark.values())
            .flat_map(|a| a.q.iter().copied())
            .chain(self.selection.values().flat_map(|a| a.q.iter().copied()))
    }

    /// Checks `N(s) = sum_a N(s, a)` for every node.
    pub fn counts_consistent(&self) -> bool {
        self.goal
            .values()
            .chain(self.landmark.values())
            .all(|a| a.n == a.count.iter().sum::<u64>())
            && self.selection.values().all(|a| a.n == a.count.iter().sum::<u64>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn utility_examples() {
        let cfg = LampConfig::default();
        assert_eq!(gubs_utility(0, true, &cfg), 2.0);
        assert!((gubs_utility(10, false, &cfg) - 0.367_879_441_171_442_3).abs() < 1e-15);
        assert!((gubs_utility(20, true, &cfg) - 1.135_335_283_236_612_7).abs() < 1e-15);
    }

    #[test]
    fn ucb_examples() {
        assert_eq!(ucb1(0.3, 10, 0, 1.0), f64::INFINITY);
        let v = ucb1(0.5, 4, 2, std::f64::consts::SQRT_2);
        assert!((v - 1.677_410_022_515_474_7).abs() < 1e-12, "{v}");
        assert_eq!(ucb1(0.25, 9, 3, 0.0), 0.25);
    }

    #[test]
    fn update_examples() {
        let cfg = LampConfig::default();
        let mut arms: Arms<u8> = Arms::new(Rc::from(vec![0u8, 1]));
        ucb_update(&mut arms, 0, 0, true, &cfg);
        assert_eq!(arms.q[0], 2.0);
        // Mean of {1, 2}: force an existing sample of 1.0.
        let mut one = Arms::new(Rc::from(vec![0u8]));
        one.q[0] = 1.0;
        one.count[0] = 1;
        one.n = 1;
        ucb_update(&mut one, 0, 0, true, &cfg);
        assert_eq!(one.q[0], 1.5);
        let mut k = Arms::new(Rc::from(vec![0u8]));
        let v = gubs_utility(7, false, &cfg);
        for _ in 0..9 {
            ucb_update(&mut k, 0, 7, false, &cfg);
        }
        assert_eq!(k.count[0], 9);
        assert_eq!(k.q[0], v);
        assert_eq!(arms.n, 1);
    }

    #[test]
    fn argmax_draws_only_on_ties() {
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let b = a.clone();
        assert_eq!(argmax_random(&[0.1, 0.7, 0.2], &mut a), Some(1));
        assert_eq!(a, b, "no draw without a tie");
        assert_eq!(argmax_random(&[], &mut a), None);
        let mut hits = [0; 2];
        for _ in 0..1000 {
            hits[argmax_random(&[f64::INFINITY, f64::INFINITY, 0.0], &mut a).unwrap()] += 1;
        }
        assert!(hits[0] > 400 && hits[1] > 400);
    }
}
