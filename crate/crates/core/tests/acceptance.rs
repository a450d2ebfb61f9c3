//! End-to-end acceptance criteria. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any criterion fails.

mod common;

use std::time::Instant;

use common::hp::Fx;
use common::{golden_path, landmarks_of};
use lamp::fixtures;
use lamp::harness::*;
use lamp::landmarks::{LandmarkGraph, OrderingKind};
use lamp::model::{Condition, FactId, Problem};
use lamp::oracles::*;
use lamp::planner::*;
use lamp::ppddl::generators::chain;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn grid(p: &Problem, g: &LandmarkGraph, alphas: &[f64], rollouts: &[u32]) -> Vec<CellStats> {
    let cfg = ExperimentConfig {
        alphas: alphas.to_vec(),
        rollouts: rollouts.to_vec(),
        runs: DEFAULT_RUNS,
        ..ExperimentConfig::default()
    };
    run_grid(p, g, &cfg).expect("valid grid")
}

fn cell(cells: &[CellStats], alpha: f64, n: u32) -> &CellStats {
    cells.iter().find(|c| c.alpha == alpha && c.n_rollouts == n).expect("cell present")
}

fn triangle_baseline(p: &Problem, g: &LandmarkGraph) -> Verdict {
    let cells = grid(p, g, &[0.0], &[200, 500, 1000]);
    let summary: Vec<String> = cells.iter().map(|c| format!("n={} {:.3}", c.n_rollouts, c.success_rate)).collect();
    let summary = summary.join(", ");
    if cells.iter().all(|c| c.success_rate >= 0.95) {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn triangle_greedy(p: &Problem, g: &LandmarkGraph) -> Verdict {
    let ns = [500, 1000, 2000, 5000];
    let cells = grid(p, g, &[0.0, 1.0], &ns);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in ns {
        let (base, greedy) = (cell(&cells, 0.0, n), cell(&cells, 1.0, n));
        let pass = greedy.success_rate <= 0.40
            && greedy.success_rate < base.success_rate
            && greedy.p_success_vs_alpha0 < ALPHA_STAT;
        ok &= pass;
        parts.push(format!(
            "n={n} {:.3} vs {:.3} p={}",
            greedy.success_rate,
            base.success_rate,
            sig6(greedy.p_success_vs_alpha0)
        ));
    }
    let summary = parts.join(", ");
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn blocksworld_advantage() -> Verdict {
    let p = fixtures::problem("blocksworld_small");
    let g = landmarks_of(&p);
    let ns = [10, 20, 50];
    let cells = grid(&p, &g, &[0.0, 0.2, 0.5, 0.8], &ns);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in ns {
        let base = cell(&cells, 0.0, n);
        let best = [0.2, 0.5, 0.8]
            .iter()
            .map(|&a| cell(&cells, a, n))
            .filter(|c| c.mean_cost < base.mean_cost)
            .min_by(|a, b| a.p_cost_vs_alpha0.total_cmp(&b.p_cost_vs_alpha0));
        match best {
            Some(c) if c.p_cost_vs_alpha0 < ALPHA_STAT => parts.push(format!(
                "n={n} alpha={} {:.1} vs {:.1} p={}",
                c.alpha,
                c.mean_cost,
                base.mean_cost,
                sig6(c.p_cost_vs_alpha0)
            )),
            Some(c) => {
                ok = false;
                parts.push(format!("n={n} best alpha={} p={} not significant", c.alpha, sig6(c.p_cost_vs_alpha0)));
            }
            None => {
                ok = false;
                parts.push(format!("n={n} no alpha beats {:.1}", base.mean_cost));
            }
        }
    }
    let summary = parts.join(", ");
    if ok {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn landmark_soundness() -> Verdict {
    let cases: Vec<(&str, Problem, usize)> = vec![
        ("detour", fixtures::problem("detour"), 8),
        ("chain_b3_d4", chain(3, 4), 4),
        ("order_choice", fixtures::problem("order_choice"), 8),
        ("order_coin", fixtures::problem("order_coin"), 8),
        ("softlock", fixtures::problem("softlock"), 8),
        ("deadlock", fixtures::problem("deadlock"), 8),
        ("triangle_p1", fixtures::problem("triangle_p1"), 10),
        ("tireworld_small", fixtures::problem("tireworld_small"), 10),
    ];
    let (mut landmarks, mut orderings) = (0, 0);
    let mut bad = Vec::new();
    for (name, p, bound) in &cases {
        let g = landmarks_of(p);
        let hs = match enumerate_goal_histories(p, *bound) {
            Ok(hs) => hs,
            Err(e) => return Err(format!("{name}: {e}")),
        };
        if hs.is_empty() {
            return Err(format!("{name}: no goal history within {bound} steps"));
        }
        let report = validate_graph(&g, &hs);
        landmarks += report.landmarks_checked;
        orderings += report.orderings_checked;
        if !report.is_sound() {
            let kinds: Vec<OrderingKind> = report.bad_orderings.iter().map(|&i| g.orderings()[i].kind).collect();
            bad.push(format!("{name}: landmarks {:?} orderings {kinds:?}", report.bad_landmarks));
        }
    }
    let summary = format!("{} fixtures, {landmarks} landmarks, {orderings} orderings", cases.len());
    if bad.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; unsound: {}", bad.join("; ")))
    }
}

fn uct_equivalence() -> Verdict {
    let mut compared = 0;
    for name in ["detour", "tireworld_small", "triangle_p2"] {
        let p = fixtures::problem(name);
        let g = LandmarkGraph::goal_only(&p);
        for seed in 0..100 {
            let cfg = LampConfig { n_rollouts: 30, seed, ..LampConfig::default() };
            let a = lamp(&p, &g, &cfg).expect("valid config");
            let b = plain_uct(&p, &cfg).expect("valid config");
            if a.actions() != b.actions() {
                return Err(format!("{name} seed {seed} diverges"));
            }
            compared += 1;
        }
    }
    Ok(format!("{compared} runs identical"))
}

fn convergence() -> Verdict {
    let p = fixtures::problem("detour");
    let g = LandmarkGraph::goal_only(&p);
    let optimum = value_iteration(&p, Criterion::ExpectedGubs, &LampConfig::default())
        .expect("small fixture")
        .action(&p.init)
        .expect("init is not terminal");
    let a1 = p.action_id("a1").expect("fixture action");
    if optimum != a1 {
        return Err(format!("value iteration picks {}", p.action(optimum).name));
    }
    let mut hits = 0;
    for seed in 0..100 {
        let cfg = LampConfig { n_rollouts: 50_000, alpha: 0.0, seed, ..LampConfig::default() };
        let mut core = LampCore::new(&p, &g, cfg).expect("valid config");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let goal = g.goal_node();
        core.run_rollouts(&p.init, Some(goal), &g.all(), 0, &mut rng);
        if core.best_action(&p.init, goal, &mut rng) == Some(optimum) {
            hits += 1;
        }
    }
    let summary = format!("{hits}/100 trials pick a1");
    if hits >= 95 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn triangle_recovery(p: &Problem, g: &LandmarkGraph) -> Verdict {
    let expected =
        Condition::disjunction(["n7", "n10", "n13"].map(|n| p.fact_id(&format!("car-at({n})")).expect("location")))
            .expect("non-empty");
    let found = g.landmarks().iter().any(|l| l.condition == expected);
    // Longest chain of landmark nodes, each ordered before the next, all
    // ordered before the goal node.
    let n = g.len();
    let goal = g.goal_node();
    let mut nodes = vec![1usize; n];
    for _ in 0..n {
        for o in g.orderings() {
            nodes[o.to.index()] = nodes[o.to.index()].max(nodes[o.from.index()] + 1);
        }
    }
    let chain = g
        .landmarks()
        .iter()
        .filter(|l| l.id != goal && g.precedes(l.id, goal))
        .map(|l| nodes[l.id.index()])
        .max()
        .unwrap_or(0);
    let summary = format!("disjunction {}, chain of {chain} before goal", if found { "found" } else { "missing" });
    if found && chain >= 3 {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn sequential_speedup() -> Verdict {
    let p = chain(3, 8);
    let chosen = |levels: std::ops::Range<u32>| -> Vec<FactId> {
        levels.map(|i| p.fact_id(&format!("chosen(l{i},c0)")).expect("chain fact")).collect()
    };
    let seq = vec![
        Condition::conjunction(chosen(0..2)),
        Condition::conjunction(chosen(2..4)),
        Condition::conjunction(chosen(4..6)),
        p.goal.clone(),
    ];
    let mut bfs = BfsPlanner::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = sequential_plan(&p, &seq, &mut bfs, 100, &mut rng);
    if out.status != SequentialStatus::Success {
        return Err(format!("sequential plan failed: {:?}", out.status));
    }
    let (_, plain) = bfs_expansions(&p, &p.init, &p.goal);
    let path = golden_path();
    for (key, v) in [("bfs.chain_b3_d8", plain), ("sequential.chain_b3_d8_k4", bfs.expanded)] {
        if let Err(e) = check_or_record(&path, key, &v.to_string()) {
            return Err(e.to_string());
        }
    }
    let summary = format!("{} vs {plain} expansions", bfs.expanded);
    if bfs.expanded * 10 < plain {
        Ok(summary)
    } else {
        Err(summary)
    }
}

fn csv_determinism(p: &Problem, g: &LandmarkGraph) -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig { rollouts: vec![10, 50], runs: 5, base_seed: 7, ..ExperimentConfig::default() };
    let mut files = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("grid{i}.csv"));
        let cells = run_grid(p, g, &cfg).map_err(|e| e.to_string())?;
        emit_csv(&cells, &path).map_err(|e| e.to_string())?;
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    if files[0] == files[1] {
        Ok(format!("{} bytes identical", files[0].len()))
    } else {
        Err("CSV output differs".into())
    }
}

fn close(approx: f64, exact: &Fx) -> bool {
    exact.close_to(approx, 12)
}

fn unit_formulas() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..1000 {
        let cfg = LampConfig {
            utility_decay: rng.random_range(0.5..50.0),
            k_g: rng.random_range(0.0..5.0),
            ..LampConfig::default()
        };
        let cost: u32 = rng.random_range(0..=200);
        let goal: bool = rng.random();
        let u = |cost: u32, goal: bool| {
            let e = (Fx::int(0) - Fx::int(i64::from(cost)) / Fx::from_f64(cfg.utility_decay)).exp();
            if goal {
                e + Fx::from_f64(cfg.k_g)
            } else {
                e
            }
        };
        if !close(gubs_utility(cost, goal, &cfg), &u(cost, goal)) {
            return Err(format!("gubs_utility case {i}: cost {cost} {cfg:?}"));
        }

        let q: f64 = rng.random_range(0.0..2.0);
        let n_sa: u64 = rng.random_range(1..10_000);
        let n_s: u64 = n_sa + rng.random_range(0..100_000);
        let c: f64 = rng.random_range(0.01..4.0);
        let exact =
            Fx::from_f64(q) + Fx::from_f64(c) * (Fx::int(n_s as i64).ln() / Fx::int(n_sa as i64)).sqrt();
        if !close(ucb1(q, n_s, n_sa, c), &exact) {
            return Err(format!("ucb1 case {i}: q {q} n_s {n_s} n_sa {n_sa} c {c}"));
        }

        let mut arms = Arms::new(std::rc::Rc::from(vec![0u32, 1]));
        arms.q[1] = q;
        arms.count[1] = n_sa;
        arms.n = n_s;
        ucb_update(&mut arms, 1, cost, goal, &cfg);
        let n = Fx::int(n_sa as i64);
        let exact = (n.clone() * Fx::from_f64(q) + u(cost, goal)) / (n + Fx::int(1));
        if !close(arms.q[1], &exact) || arms.count[1] != n_sa + 1 || arms.n != n_s + 1 {
            return Err(format!("ucb_update case {i}: q {q} n {n_sa} cost {cost}"));
        }
    }
    Ok("1000 inputs within 1e-12".into())
}

fn main() {
    let p2 = fixtures::problem("triangle_p2");
    let g2 = landmarks_of(&p2);
    type Check<'a> = Box<dyn Fn() -> Verdict + 'a>;
    let criteria: Vec<(&str, Check)> = vec![
        ("triangle-p2 baseline", Box::new(|| triangle_baseline(&p2, &g2))),
        ("triangle-p2 greedy pathology", Box::new(|| triangle_greedy(&p2, &g2))),
        ("blocksworld low-rollout advantage", Box::new(blocksworld_advantage)),
        ("landmark soundness", Box::new(landmark_soundness)),
        ("alpha=0 equals UCT", Box::new(uct_equivalence)),
        ("convergence on detour", Box::new(convergence)),
        ("triangle-p2 landmark recovery", Box::new(|| triangle_recovery(&p2, &g2))),
        ("sequential speed-up", Box::new(sequential_speedup)),
        ("grid determinism", Box::new(|| csv_determinism(&p2, &g2))),
        ("unit formulas", Box::new(unit_formulas)),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = check();
        let secs = start.elapsed().as_secs_f64();
        match &verdict {
            Ok(msg) => println!("criterion {:>2} PASS {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                println!("criterion {:>2} FAIL {name}: {msg} ({secs:.1}s)", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
