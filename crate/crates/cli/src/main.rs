//! `soergel`: command-line front end for the rewriting engine and its oracle.
//!
//! Exit codes: 0 success, 1 relation or property failure, 2 input error,
//! 3 fuel exhaustion.

use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use soergel::bimodule::{check_equal, independent, points_to_text, Oracle};
use soergel::expr::random_expression;
use soergel::lightleaves::{enumerate_fl, is_member_fl, DEFAULT_BOUND};
use soergel::measures::stats;
use soergel::rewrite::{check_rule, registry, Normalizer, DEFAULT_FUEL};
use soergel::{CoxeterGraph, Error, Expression, Gen, LinComb, Word};

#[derive(Parser)]
#[command(name = "soergel", about = "Normal forms for right-angled Soergel diagrams")]
struct Cli {
    /// Fuel multiplier: each stage may take `fuel·L²` steps along one path.
    #[arg(long, global = true, default_value_t = DEFAULT_FUEL)]
    fuel: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Checks every rule instance against the bimodule oracle.
    Check {
        graph: String,
        /// Corrupts every instance of the named rule family (test hook).
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Normalizes an expression with empty codomain.
    Normalize {
        graph: String,
        /// Expression text or a file containing it.
        expr: String,
        #[arg(long)]
        trace: bool,
    },
    /// Lists the light leaves basis of a word.
    Basis {
        graph: String,
        /// Space or comma separated generator names.
        word: String,
        #[arg(long)]
        verify_independence: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BOUND)]
        bound: usize,
    },
    /// Prints the oracle matrix of an expression.
    Eval { graph: String, expr: String },
    /// Prints the badness statistics of an expression.
    Stats { graph: String, expr: String },
    /// Normalizes seeded random expressions and checks the results.
    Fuzz {
        graph: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        max_word: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match &err {
            Error::FuelExhausted { .. } => 3,
            Error::Internal(_) | Error::NotGoodExpression(_) => 1,
            _ => 2,
        };
        let msg = match &err {
            Error::FuelExhausted { trace, .. } => format!("{err}\ntrace:\n{trace}"),
            _ => err.to_string(),
        };
        Failure { code, msg }
    }
}

fn input(msg: String) -> Failure {
    Failure { code: 2, msg }
}

/// A graph file, or one of the built-in names `A1`, `A1xA1`, `Iinf`, `mixed`,
/// `commuting3`.
fn load_graph(arg: &str) -> Result<CoxeterGraph, Failure> {
    if Path::new(arg).is_file() {
        let text = std::fs::read_to_string(arg).map_err(|e| input(format!("{arg}: {e}")))?;
        return Ok(CoxeterGraph::parse(&text)?);
    }
    let builtin = CoxeterGraph::test_systems()
        .into_iter()
        .chain([("commuting3", CoxeterGraph::commuting3())])
        .find(|(name, _)| name.eq_ignore_ascii_case(arg));
    builtin.map(|(_, g)| g).ok_or_else(|| input(format!("no graph file or built-in graph named `{arg}`")))
}

/// Parses and typechecks an expression given inline or as a file.
fn load_expr(arg: &str, graph: &CoxeterGraph) -> Result<Expression, Failure> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(|e| input(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    let e = Expression::parse(text.trim(), graph)?;
    e.typecheck(graph)?;
    Ok(e)
}

fn check(graph: &CoxeterGraph, corrupt: Option<&str>) -> Result<(), Failure> {
    let oracle = Oracle::new(graph);
    let mut failed = 0;
    let mut first = None;
    let rules = registry(graph)?;
    for rule in &rules {
        let rule = match corrupt {
            Some(name) if rule.name == name => rule.corrupted(),
            _ => rule.clone(),
        };
        match check_rule(&oracle, &rule) {
            Ok(()) => println!("OK {}", rule.label),
            Err(m) => {
                println!("FAIL {} {}", rule.label, m.basis);
                failed += 1;
                first.get_or_insert_with(|| format!("{}\ncounterexample at basis vector {}", rule.to_text(graph), m.basis));
            }
        }
    }
    println!("rules: {}, failed: {failed}", rules.len());
    match first {
        Some(msg) => Err(Failure { code: 1, msg }),
        None => Ok(()),
    }
}

fn normalize(graph: &CoxeterGraph, fuel: usize, expr: &str, trace: bool) -> Result<(), Failure> {
    let e = load_expr(expr, graph)?;
    let out = Normalizer::new(graph)?.with_fuel(fuel).normalize(&e)?;
    print!("{}", out.result.to_text(graph));
    if trace {
        println!("trace:");
        print!("{}", out.trace.to_text());
    }
    Ok(())
}

fn basis(graph: &CoxeterGraph, word: &str, verify: bool, seed: u64, bound: usize) -> Result<(), Failure> {
    let w = Word::parse(word, graph)?;
    let leaves = enumerate_fl(&w, graph, bound)?;
    for leaf in &leaves {
        println!("{} :{}", leaf.moves_text(), leaf.expression(graph).terms_text(graph));
    }
    println!("count: {}", leaves.len());
    if verify {
        let oracle = Oracle::new(graph);
        let maps = leaves
            .iter()
            .map(|l| oracle.eval_expression(&l.expression(graph)))
            .collect::<Result<Vec<_>, _>>()?;
        let verdict = independent(&maps, graph, seed, 3);
        println!("points:\n{}", points_to_text(&verdict.points, graph));
        if !verdict.independent {
            println!("independent: inconclusive");
            return Err(Failure { code: 1, msg: "independence not certified".into() });
        }
        println!("independent: yes");
    }
    Ok(())
}

/// Outcome of one fuzz case: `None` on success, else the exit code and report.
fn fuzz_case(graph: &CoxeterGraph, fuel: usize, seed: u64, max_word: usize, max_len: usize) -> Option<(u8, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = if graph.rank() == 0 { 0 } else { rng.gen_range(0..=max_word.min(max_len)) };
    let word = Word((0..n).map(|_| Gen(rng.gen_range(0..graph.rank()))).collect());
    let e = random_expression(graph, &word, max_len, rng.gen()).expect("word fits the length budget");
    let report = |code: u8, what: String| Some((code, format!("seed {seed}: {}: {what}", e.to_text(graph))));
    let normalizer = Normalizer::new(graph).expect("graph was validated").with_fuel(fuel);
    let out = match normalizer.normalize(&e) {
        Ok(out) => out,
        Err(err) => {
            let f = Failure::from(err);
            return report(f.code.max(1), f.msg);
        }
    };
    let oracle = Oracle::new(graph);
    if let Err(m) = check_equal(&oracle, &LinComb::single(e.clone()), &out.result, &e.domain, &Word::empty()) {
        return report(1, format!("oracle mismatch at basis vector {}", m.basis));
    }
    for x in out.result.expressions() {
        if !is_member_fl(x, graph).unwrap_or(false) {
            return report(1, format!("output outside the basis: {}", x.to_text(graph)));
        }
    }
    let violations = out.trace.violations();
    if !violations.is_empty() {
        return report(1, format!("key did not decrease: {}", violations.join("; ")));
    }
    None
}

fn fuzz(graph: &CoxeterGraph, fuel: usize, count: usize, seed: u64, max_word: usize, max_len: usize) -> Result<(), Failure> {
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..count).map(|_| seeder.gen()).collect();
    let results: Vec<Option<(u8, String)>> =
        seeds.par_iter().map(|&s| fuzz_case(graph, fuel, s, max_word, max_len)).collect();
    let mut code = 0;
    for (i, r) in results.iter().enumerate() {
        if let Some((c, msg)) = r {
            println!("FAIL case {i} {msg}");
            code = code.max(*c);
        }
    }
    let failed = results.iter().filter(|r| r.is_some()).count();
    println!("cases: {count}, failed: {failed}");
    if code == 0 {
        Ok(())
    } else {
        Err(Failure { code, msg: format!("{failed} of {count} cases failed") })
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Check { graph, corrupt } => check(&load_graph(&graph)?, corrupt.as_deref()),
        Command::Normalize { graph, expr, trace } => normalize(&load_graph(&graph)?, cli.fuel, &expr, trace),
        Command::Basis { graph, word, verify_independence, seed, bound } => {
            basis(&load_graph(&graph)?, &word, verify_independence, seed, bound)
        }
        Command::Eval { graph, expr } => {
            let g = load_graph(&graph)?;
            let e = load_expr(&expr, &g)?;
            print!("{}", Oracle::new(&g).eval_expression(&e)?.to_text(&g));
            Ok(())
        }
        Command::Stats { graph, expr } => {
            let g = load_graph(&graph)?;
            let e = load_expr(&expr, &g)?;
            print!("{}", stats(&e, &g)?.to_text());
            Ok(())
        }
        Command::Fuzz { graph, count, seed, max_word, max_len } => {
            fuzz(&load_graph(&graph)?, cli.fuel, count, seed, max_word, max_len)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
