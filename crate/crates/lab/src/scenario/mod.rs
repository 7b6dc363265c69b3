//! Named scenarios: fixed setups with assertions, each carrying where its
//! expected value comes from.

mod samples;
mod suite;

use serde::Serialize;
use serde_json::{json, Value};

use iaut::Result;

pub use samples::{random_split_case, theorem_b_samples};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Provenance {
    Paper,
    Derived,
    Trivial,
}

#[derive(Clone, Debug, Serialize)]
pub struct Assertion {
    pub id: String,
    pub operation: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Default)]
pub struct Params {
    pub budget: Option<usize>,
    pub seed: u64,
    pub primes: Option<u64>,
    pub n: Option<u32>,
    pub s: Option<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub params: Value,
    pub setup: Value,
    pub assertions: Vec<Assertion>,
    pub pass: bool,
}

pub struct Scenario {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(&Params, &mut Ctx) -> Result<()>,
}

/// Collects assertions for one run.
pub struct Ctx {
    prefix: String,
    setup: serde_json::Map<String, Value>,
    params: serde_json::Map<String, Value>,
    out: Vec<Assertion>,
}

impl Ctx {
    fn new(prefix: &str) -> Self {
        Ctx { prefix: prefix.to_string(), setup: Default::default(), params: Default::default(), out: Vec::new() }
    }

    pub fn setup(&mut self, key: &str, v: impl Serialize) {
        self.setup.insert(key.to_string(), json!(v));
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.params.insert(key.to_string(), json!(v));
    }

    /// Records `actual == expected`.
    pub fn eq<E: Serialize, A: Serialize>(&mut self, id: &str, op: &str, expected: E, actual: Result<A>, tag: Provenance) {
        let expected = json!(expected);
        let (actual, pass) = match actual {
            Ok(a) => {
                let a = json!(a);
                let pass = a == expected;
                (a, pass)
            }
            Err(e) => (json!({ "error": e.to_string() }), false),
        };
        self.push(id, op, expected, actual, pass, tag);
    }

    /// Records a predicate whose evidence is `actual`.
    pub fn holds(&mut self, id: &str, op: &str, expected: &str, actual: Result<(bool, Value)>, tag: Provenance) {
        let (actual, pass) = match actual {
            Ok((p, v)) => (v, p),
            Err(e) => (json!({ "error": e.to_string() }), false),
        };
        self.push(id, op, json!(expected), actual, pass, tag);
    }

    fn push(&mut self, id: &str, op: &str, expected: Value, actual: Value, pass: bool, tag: Provenance) {
        self.out.push(Assertion {
            id: format!("{}/{}", self.prefix, id),
            operation: op.to_string(),
            expected,
            actual,
            pass,
            provenance: tag,
        });
    }
}

pub fn scenario_suite() -> &'static [Scenario] {
    suite::SUITE
}

pub fn find(name: &str) -> Option<&'static Scenario> {
    scenario_suite().iter().find(|s| s.name == name)
}

impl Scenario {
    pub fn run(&self, params: &Params) -> Report {
        let mut ctx = Ctx::new(self.name);
        if let Err(e) = (self.run)(params, &mut ctx) {
            ctx.push("setup", "scenario", json!("completes"), json!({ "error": e.to_string() }), false, Provenance::Trivial);
        }
        let mut assertions = ctx.out;
        assertions.sort_by(|a, b| a.id.cmp(&b.id));
        let pass = assertions.iter().all(|a| a.pass);
        Report {
            scenario: self.name.to_string(),
            seed: params.seed,
            params: Value::Object(ctx.params),
            setup: Value::Object(ctx.setup),
            assertions,
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub scenarios: Vec<Report>,
    pub pass: bool,
}

/// Every scenario with its default parameters and the given seed.
pub fn run_suite(seed: u64) -> SuiteReport {
    let params = Params { seed, ..Default::default() };
    let scenarios: Vec<Report> = scenario_suite().iter().map(|s| s.run(&params)).collect();
    let pass = scenarios.iter().all(|r| r.pass);
    SuiteReport { seed, scenarios, pass }
}
