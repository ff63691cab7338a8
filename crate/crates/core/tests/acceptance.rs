// Reproduction checks, one line per criterion. Exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use insitu_core::abstraction::{classify_far, classify_near, longitudinal_offset, update_model, Horizon, Tier};
use insitu_core::checker::TieBreak;
use insitu_core::geometry::mirror_cloud;
use insitu_core::planner::{is_admissible, make_plan, mirrored_policy, solve, PlanError, Task};
use insitu_core::run::{bench_planner, capture_trigger, simulate, RunSummary};
use insitu_core::scenario::BUNDLED;
use insitu_core::sim::AgentMode;
use insitu_core::{AbstractionParams, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn run(name: &str, mode: AgentMode, seed: Option<u64>) -> Result<(RunSummary, Duration), String> {
    let mut s = Scenario::bundled(name).map_err(|e| e.to_string())?;
    s.agent_mode = mode;
    if let Some(seed) = seed {
        s.seed = seed;
    }
    let t0 = Instant::now();
    let out = simulate(&s).map_err(|e| e.to_string())?;
    Ok((out.summary, t0.elapsed()))
}

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn plan_reproduction_culdesac() -> Outcome {
    let mut slowest = Duration::ZERO;
    for seed in 0..10 {
        let (s, took) = run("culdesac_A", AgentMode::MultiStep, Some(seed))?;
        slowest = slowest.max(took);
        let first = s.plans.first().ok_or(format!("seed {seed}: no plan"))?;
        check(
            first.tasks.len() == 3 && first.tasks[0] == Task::Right,
            format!("seed {seed}: first plan {:?}", first.tasks),
        )?;
        check(
            matches!(first.terminal_state, Horizon::S8 | Horizon::S12),
            format!("seed {seed}: terminal {:?}", first.terminal_state),
        )?;
    }
    let (s, took) = run("culdesac_A", AgentMode::MultiStep, None)?;
    slowest = slowest.max(took);
    let first = &s.plans[0];
    check(first.terminal_state == Horizon::S12, format!("bundled seed ends at {:?}", first.terminal_state))?;
    check(first.tasks == [Task::Right, Task::Straight, Task::Right], format!("bundled seed plans {:?}", first.tasks))?;
    check(slowest < Duration::from_secs(5), format!("slowest run {slowest:?}"))?;
    Ok(format!("<TR, T0, TR> at s12 with seed {}, slowest run {:.0} ms", s.seed, slowest.as_secs_f64() * 1e3))
}

fn plan_reproduction_corner() -> Outcome {
    let (s, _) = run("corner_B", AgentMode::MultiStep, None)?;
    let first = s.plans.first().ok_or("no plan")?;
    check(first.tasks == [Task::Left, Task::Left], format!("plan {:?}", first.tasks))?;
    check(first.tier == Tier::TwoStep, format!("tier {:?}", first.tier))?;
    check(first.safe_horizons == BTreeSet::from([Horizon::S14]), format!("safe {:?}", first.safe_horizons))?;
    check(!s.collided && s.exit_achieved, format!("collided {} exit {}", s.collided, s.exit_achieved))?;
    Ok("<TL, TL>, two-step, {s14}, exits clean".into())
}

fn baseline_contrast() -> Outcome {
    let (b, _) = run("corner_B", AgentMode::OneStepBaseline, None)?;
    check(b.collided, "baseline did not collide in corner_B")?;
    let (m, _) = run("culdesac_A", AgentMode::MultiStep, None)?;
    let (b, _) = run("culdesac_A", AgentMode::OneStepBaseline, None)?;
    let ratio = b.path_length / m.path_length;
    check(ratio >= 1.2, format!("culdesac_A path ratio {ratio:.3}"))?;
    Ok(format!(
        "corner_B baseline collides; culdesac_A path {:.2} m vs {:.2} m ({ratio:.2}x)",
        b.path_length, m.path_length
    ))
}

fn latency() -> Outcome {
    let mut parts = Vec::new();
    for (name, _) in BUNDLED {
        let s = Scenario::bundled(name).map_err(|e| e.to_string())?;
        let cap = capture_trigger(&s).map_err(|e| e.to_string())?;
        let stats = bench_planner(&cap, &s.params, 1000);
        check(stats.solved, format!("{name}: no plan"))?;
        check(stats.p99_us < 11_000.0, format!("{name}: p99 {:.1} us", stats.p99_us))?;
        parts.push(format!("{name} p99 {:.1} us", stats.p99_us));
    }
    Ok(parts.join(", "))
}

fn checker_oracle() -> Outcome {
    let t0 = Instant::now();
    let mut with_plan = 0;
    for mask in 0u32..128 {
        let safe: BTreeSet<Horizon> =
            Horizon::ALL.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, h)| *h).collect();
        let oracle = common::enumerate_plans(&safe, 4);
        for policy in std::iter::once(TieBreak::Declaration).chain((0..8).map(TieBreak::seeded)) {
            match solve(&safe, &policy) {
                Ok((tasks, terminal)) => {
                    check(!oracle.is_empty(), format!("{safe:?}: spurious plan"))?;
                    check(
                        oracle.iter().any(|(t, s)| *t == tasks && *s == terminal.state()),
                        format!("{safe:?}: {tasks:?} not a solution path"),
                    )?;
                    check(is_admissible(&tasks), format!("{tasks:?} not admissible"))?;
                }
                Err(PlanError::NoSolution) => check(oracle.is_empty(), format!("{safe:?}: missed a plan"))?,
                Err(e) => return Err(e.to_string()),
            }
        }
        with_plan += usize::from(!oracle.is_empty());
    }
    let took = t0.elapsed();
    check(took < Duration::from_secs(1), format!("took {took:?}"))?;
    Ok(format!("128 safe sets, {with_plan} solvable, {:.0} ms", took.as_secs_f64() * 1e3))
}

fn abstraction_oracle() -> Outcome {
    let p = AbstractionParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut mismatches = 0usize;
    for _ in 0..10_000 {
        let (cloud, d) = common::random_scan(&mut rng, &p);
        let oracle = common::oracle_update(&cloud, &d, &p);
        let report = update_model(&cloud, &d, &p);
        let dx = longitudinal_offset(&d, &p);
        let (o1, o2) = classify_near(&cloud, dx, &p);
        let mut ours = [Some(o1), Some(o2), None, None, None, None];
        if let Some(dy) = report.offsets.dy_plus {
            let (f, b) = classify_far(&cloud, dx, dy, &p);
            (ours[2], ours[4]) = (Some(f), Some(b));
        }
        if let Some(dy) = report.offsets.dy_minus {
            let (f, b) = classify_far(&cloud, dx, dy, &p);
            (ours[3], ours[5]) = (Some(f), Some(b));
        }
        mismatches += (0..6).filter(|&k| ours[k] != oracle.subsets[k]).count();
        mismatches += usize::from(report.safe_horizons != oracle.safe);
    }
    check(mismatches == 0, format!("{mismatches} mismatches"))?;
    Ok("10000 clouds, 0 mismatches".into())
}

fn mirror_symmetry() -> Outcome {
    let p = AbstractionParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut violations = 0;
    for _ in 0..1000 {
        let (cloud, d) = common::random_scan(&mut rng, &p);
        let policy = TieBreak::seeded(rng.random());
        let a = make_plan(update_model(&cloud, &d, &p), &policy).map_err(|e| e.to_string())?;
        let b = make_plan(update_model(&mirror_cloud(&cloud), &d.mirrored(), &p), &mirrored_policy(&policy))
            .map_err(|e| e.to_string())?;
        if b.tasks != common::mirrored_tasks(&a.tasks) || b.terminal_state != a.terminal_state.mirrored() {
            violations += 1;
        }
    }
    check(violations == 0, format!("{violations} violations"))?;
    Ok("1000 scans, 0 violations".into())
}

fn determinism() -> Outcome {
    let mut n = 0;
    for (name, _) in BUNDLED {
        for mode in [AgentMode::MultiStep, AgentMode::OneStepBaseline] {
            let mut s = Scenario::bundled(name).map_err(|e| e.to_string())?;
            s.agent_mode = mode;
            let a = simulate(&s).map_err(|e| e.to_string())?.csv();
            let b = simulate(&s).map_err(|e| e.to_string())?.csv();
            check(a == b, format!("{name} {mode}: logs differ"))?;
            n += 1;
        }
    }
    Ok(format!("{n} scenario/mode pairs byte-identical"))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("plan reproduction, cul-de-sac", plan_reproduction_culdesac),
        ("plan reproduction, corner", plan_reproduction_corner),
        ("baseline contrast", baseline_contrast),
        ("planning latency", latency),
        ("checker oracle equivalence", checker_oracle),
        ("abstraction oracle equivalence", abstraction_oracle),
        ("mirror symmetry", mirror_symmetry),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
