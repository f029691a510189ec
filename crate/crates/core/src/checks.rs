//! Per-instance property checks and seeded input generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distance::eccentricities;
use crate::gadgets::{render_bits, Bits, Construction, GadgetError, Instance, Side};
use crate::graph::GraphError;
use crate::label::{CopyTag, Role};
use crate::scalar::{render_rational, Rational};
use crate::spanner::verify_instance;

/// The recorded constant `c` in the sparsity check `m <= c n log2 n`.
pub fn sparsity_constant() -> Rational {
    Rational::from_integer(2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub observed: String,
    pub expected: String,
}

impl Check {
    fn new(name: &'static str, pass: bool, observed: impl ToString, expected: impl ToString) -> Self {
        Check {
            name,
            pass,
            observed: observed.to_string(),
            expected: expected.to_string(),
        }
    }
}

/// The graph quantity each construction is about.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Observation {
    pub quantity: &'static str,
    pub observed: String,
    pub predicted: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceReport {
    pub construction: Construction,
    pub k: u32,
    #[serde(rename = "P")]
    pub p: u32,
    pub shaved: bool,
    pub sa: String,
    pub sb: String,
    pub intersecting: bool,
    pub n: usize,
    pub m: usize,
    pub cut_size: usize,
    pub max_degree: usize,
    pub observation: Observation,
    pub checks: Vec<Check>,
}

impl InstanceReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// Runs every check that applies to the instance's construction.
pub fn verify(inst: &Instance) -> Result<InstanceReport, CheckError> {
    let c = inst.construction();
    let g = &inst.graph;
    let k = inst.k();
    let p = inst.p() as u64;
    let yes = inst.ground_truth_intersecting();
    let mut checks = Vec::new();

    let cut_expected = c.cut_size(k, inst.meta.shaved);
    checks.push(Check::new("cut-size", inst.cut.len() == cut_expected, inst.cut.len(), cut_expected));
    // a padding clique is dense on purpose
    if inst.meta.clique_pad.is_none() {
        let cs = sparsity_constant();
        checks.push(Check::new(
            "sparsity",
            g.sparsity_check(cs),
            g.edge_count(),
            format!("<= {} n log2 n", render_rational(&cs)),
        ));
    }
    checks.push(Check::new(
        "input-length",
        inst.input.len() == c.input_len(k, inst.meta.shaved),
        inst.input.len(),
        c.input_len(k, inst.meta.shaved),
    ));

    let observation = if c == Construction::Spanner {
        let verdict = verify_instance(inst)?;
        checks.push(Check::new(
            "spanner-iff",
            verdict.ok != yes,
            verdict.ok,
            if yes { "false" } else { "true" },
        ));
        if let Some(w) = &verdict.witness {
            // the violation sits between l_i and r_i for a shared bit i
            let label_ok = matches!(
                (&g.label(w.u).role, &g.label(w.v).role),
                (Role::L(i), Role::R(j)) if i == j
            );
            checks.push(Check::new(
                "spanner-witness",
                !yes || label_ok,
                format!("({}, {})", g.label(w.u), g.label(w.v)),
                "(l_i, r_i)",
            ));
        }
        Observation {
            quantity: "spanner-ok",
            observed: verdict.ok.to_string(),
            predicted: (!yes).to_string(),
        }
    } else {
        let ecc: Vec<u64> = eccentricities(g)?.into_iter().map(u64::from).collect();
        let diam = *ecc.iter().max().unwrap_or(&0);
        let rad = *ecc.iter().min().unwrap_or(&0);
        match c {
            Construction::DiameterExact => {
                checks.push(Check::new("diameter-iff", (diam >= 5) == yes, diam, if yes { ">= 5" } else { "<= 4" }));
                obs("diameter", diam, if yes { ">= 5" } else { "<= 4" })
            }
            Construction::DiameterApprox => {
                let (ok, want) = if yes {
                    (diam == 6 * p + 1, format!("= {}", 6 * p + 1))
                } else {
                    (diam <= 4 * p + 2, format!("<= {}", 4 * p + 2))
                };
                checks.push(Check::new("diameter-gap", ok, diam, &want));
                obs("diameter", diam, want)
            }
            Construction::RadiusExact => {
                let (ok, want) = if yes { (rad == 3, "= 3") } else { (rad >= 4, ">= 4") };
                checks.push(Check::new("radius-iff", ok, rad, want));
                obs("radius", rad, want)
            }
            Construction::RadiusApprox => {
                // split hubs leave the far hub paths at 5P+1 from the center
                let (ok, want) = match (yes, inst.meta.shaved) {
                    (true, false) => (rad == 4 * p + 1, format!("= {}", 4 * p + 1)),
                    (true, true) => (
                        (4 * p + 1..=5 * p + 1).contains(&rad),
                        format!("in [{}, {}]", 4 * p + 1, 5 * p + 1),
                    ),
                    (false, _) => (rad >= 6 * p + 1, format!(">= {}", 6 * p + 1)),
                };
                checks.push(Check::new("radius-gap", ok, rad, &want));
                let center = (0..g.n())
                    .filter(|&u| ecc[u] == rad)
                    .find(|&u| matches!(g.label(u).role, Role::LPrime(_)) && g.label(u).copy == CopyTag::None);
                checks.push(Check::new(
                    "center-in-l-prime",
                    center.is_some(),
                    center.map_or("none".to_string(), |u| g.label(u).to_string()),
                    "some center in L'",
                ));
                obs("radius", rad, want)
            }
            Construction::Eccentricity => {
                let l = inst.side_nodes(Side::Left, CopyTag::None);
                let l_ecc: Vec<u64> = l.iter().map(|&u| ecc[u]).collect();
                let min = *l_ecc.iter().min().unwrap_or(&0);
                let (ok, want) = if yes {
                    (min == 3 * p + 1, format!("min = {}", 3 * p + 1))
                } else {
                    (l_ecc.iter().all(|&e| e == 5 * p + 1), format!("all = {}", 5 * p + 1))
                };
                let seen = if yes { min.to_string() } else { format!("{l_ecc:?}") };
                checks.push(Check::new("eccentricity-gap", ok, &seen, &want));
                Observation {
                    quantity: "min-ecc-over-L",
                    observed: min.to_string(),
                    predicted: want,
                }
            }
            Construction::RadiusConstDegree => {
                let w = k.trailing_zeros() as u64;
                let t = 2 * w.trailing_zeros() as u64 + 2 * w - 1;
                checks.push(Check::new("max-degree", g.max_degree() <= 5, g.max_degree(), "<= 5"));
                let (ok, want) = if yes {
                    (rad <= t, format!("<= {t}"))
                } else {
                    (rad >= t + 1, format!(">= {}", t + 1))
                };
                checks.push(Check::new("radius-iff", ok, rad, &want));
                obs("radius", rad, want)
            }
            Construction::Spanner => unreachable!(),
        }
    };

    Ok(InstanceReport {
        construction: c,
        k,
        p: inst.p(),
        shaved: inst.meta.shaved,
        sa: inst.meta.sa.clone(),
        sb: inst.meta.sb.clone(),
        intersecting: yes,
        n: g.n(),
        m: g.edge_count(),
        cut_size: inst.cut.len(),
        max_degree: g.max_degree(),
        observation,
        checks,
    })
}

fn obs(quantity: &'static str, observed: u64, predicted: impl ToString) -> Observation {
    Observation {
        quantity,
        observed: observed.to_string(),
        predicted: predicted.to_string(),
    }
}

/// One CSV line per report, matching [`SWEEP_CSV_HEADER`].
pub const SWEEP_CSV_HEADER: &str = "construction,k,P,shaved,sa,sb,intersecting,quantity,observed,predicted,pass";

pub fn sweep_csv_row(r: &InstanceReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},\"{}\",{}",
        r.construction,
        r.k,
        r.p,
        r.shaved,
        r.sa,
        r.sb,
        r.intersecting,
        r.observation.quantity,
        r.observation.observed,
        r.observation.predicted,
        r.pass()
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InputCase {
    pub kind: &'static str,
    #[serde(serialize_with = "ser_bits")]
    pub sa: Bits,
    #[serde(serialize_with = "ser_bits")]
    pub sb: Bits,
}

fn ser_bits<S: serde::Serializer>(b: &Bits, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render_bits(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseOptions {
    pub trials: usize,
    pub seed: u64,
    /// Probability of a 1 bit.
    pub density: Rational,
    /// Enumerate all pairs instead of sampling (lengths up to 8).
    pub exhaustive: bool,
}

impl Default for CaseOptions {
    fn default() -> Self {
        CaseOptions {
            trials: 100,
            seed: 0,
            density: Rational::new(1, 2),
            exhaustive: false,
        }
    }
}

fn from_mask(len: usize, mask: u64) -> Bits {
    (0..len).map(|i| (mask >> i) & 1 == 1).collect()
}

fn random_bits(rng: &mut ChaCha8Rng, len: usize, density: Rational) -> Bits {
    let (num, den) = (*density.numer(), *density.denom());
    (0..len).map(|_| rng.gen_range(0..den) < num).collect()
}

/// All-zeros, all-ones, single shared bits, and a complementary pair with
/// and without one shared bit.
pub fn forced_cases(len: usize, seed: u64) -> Vec<InputCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xF0F0);
    let zeros = Bits::repeat(false, len);
    let ones = Bits::repeat(true, len);
    let mut out = vec![
        InputCase {
            kind: "all-zeros",
            sa: zeros.clone(),
            sb: zeros.clone(),
        },
        InputCase {
            kind: "all-ones",
            sa: ones.clone(),
            sb: ones,
        },
    ];
    for i in [0, len - 1, rng.gen_range(0..len)] {
        let mut single = zeros.clone();
        single.set(i, true);
        out.push(InputCase {
            kind: "single-shared-bit",
            sa: single.clone(),
            sb: single,
        });
    }
    let sa = random_bits(&mut rng, len, Rational::new(1, 2));
    let sb = !sa.clone();
    out.push(InputCase {
        kind: "complement",
        sa: sa.clone(),
        sb: sb.clone(),
    });
    let i = rng.gen_range(0..len);
    let (mut sa, mut sb) = (sa, sb);
    sa.set(i, true);
    sb.set(i, true);
    out.push(InputCase {
        kind: "complement-plus-one",
        sa,
        sb,
    });
    out
}

/// Input pairs for a sweep: every pair when exhaustive, else `trials`
/// seeded random pairs followed by the forced cases.
pub fn input_cases(len: usize, opts: CaseOptions) -> Vec<InputCase> {
    if opts.exhaustive {
        assert!(len <= 8, "exhaustive enumeration is limited to 8 bits");
        let mut out = Vec::with_capacity(1 << (2 * len));
        for a in 0..1u64 << len {
            for b in 0..1u64 << len {
                out.push(InputCase {
                    kind: "exhaustive",
                    sa: from_mask(len, a),
                    sb: from_mask(len, b),
                });
            }
        }
        return out;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out: Vec<InputCase> = (0..opts.trials)
        .map(|_| InputCase {
            kind: "random",
            sa: random_bits(&mut rng, len, opts.density),
            sb: random_bits(&mut rng, len, opts.density),
        })
        .collect();
    out.extend(forced_cases(len, opts.seed));
    out
}
