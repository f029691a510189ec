//! Turning flags into instances.

use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::Args;
use serde::Serialize;

use lbkit::checks::{input_cases, CaseOptions};
use lbkit::gadgets::{build, min_stretch_p, parse_bits, BitInput, Bits, Construction, ConstructionParams, Instance, StretchProblem};
use lbkit::io;
use lbkit::scalar::{parse_rational, render_rational};
use lbkit::spanner::{build_spanner_instance, SpannerParams};
use lbkit::Rational;

#[derive(Args, Debug, Clone)]
pub struct InstanceArgs {
    /// Load a graph file instead of building from flags.
    #[arg(long, conflicts_with = "construction")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub construction: Option<Construction>,
    /// Number of input-indexed nodes per side; a power of two, at least 4.
    #[arg(long)]
    pub k: Option<u32>,
    /// Stretch length for the approximation families.
    #[arg(long = "p", conflicts_with = "eps")]
    pub p: Option<u32>,
    /// Approximation slack; picks the smallest P that separates.
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub shaved: bool,
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub x: Option<u32>,
    #[arg(long)]
    pub weighted: bool,
    #[arg(long)]
    pub clique_pad: Option<u32>,
    /// Alice's string: 0/1 digits, 0x-hex, or @path.
    #[arg(long, requires = "sb")]
    pub sa: Option<String>,
    /// Bob's string, same formats.
    #[arg(long, requires = "sa")]
    pub sb: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Probability of a 1 bit in random inputs.
    #[arg(long, default_value = "1/2")]
    pub density: String,
}

/// Everything needed to rebuild an instance for a different input pair.
#[derive(Clone, Debug)]
pub enum Recipe {
    Distance(Construction, ConstructionParams),
    Spanner(SpannerParams, u32),
}

/// The resolved settings, echoed into reports.
#[derive(Clone, Debug, Serialize)]
pub struct Settings {
    pub construction: Construction,
    pub k: u32,
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<String>,
    pub shaved: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<u32>,
    pub weighted: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clique_pad: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph_file: Option<String>,
}

/// Where the input pair came from.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "source", rename_all = "kebab-case")]
pub enum InputSource {
    Flags,
    GraphFile,
    Random { seed: u64, density: String },
}

impl Recipe {
    pub fn input_len(&self) -> usize {
        match self {
            Recipe::Distance(c, p) => c.input_len(p.k, p.shaved),
            Recipe::Spanner(_, k) => *k as usize,
        }
    }

    pub fn construction(&self) -> Construction {
        match self {
            Recipe::Distance(c, _) => *c,
            Recipe::Spanner(..) => Construction::Spanner,
        }
    }

    pub fn build(&self, sa: Bits, sb: Bits) -> Result<Instance> {
        let input = BitInput::new(sa, sb, self.construction().polarity());
        Ok(match self {
            Recipe::Distance(c, p) => build(*c, p, &input)?,
            Recipe::Spanner(s, k) => build_spanner_instance(s, *k, &input)?,
        })
    }
}

pub fn rational(name: &str, text: &str) -> Result<Rational> {
    parse_rational(text).ok_or_else(|| anyhow!("--{name}: expected an integer or p/q, got {text:?}"))
}

fn stretch_problem(c: Construction) -> Option<StretchProblem> {
    match c {
        Construction::DiameterApprox => Some(StretchProblem::DiameterApprox),
        Construction::RadiusApprox => Some(StretchProblem::RadiusApprox),
        Construction::Eccentricity => Some(StretchProblem::EccApprox),
        _ => None,
    }
}

/// Spanner parameters from the shared flags.
pub fn spanner_params(
    alpha: Option<&str>,
    beta: Option<&str>,
    x: Option<u32>,
    weighted: bool,
    clique_pad: Option<u32>,
) -> Result<SpannerParams> {
    let alpha = rational("alpha", alpha.ok_or_else(|| anyhow!("spanner needs --alpha"))?)?;
    let beta = rational("beta", beta.ok_or_else(|| anyhow!("spanner needs --beta"))?)?;
    let params = SpannerParams::new(alpha, beta, x.unwrap_or(1))
        .weighted(weighted)
        .clique_pad(clique_pad);
    params.p()?;
    Ok(params)
}

impl InstanceArgs {
    /// The recipe and report settings described by the flags.
    pub fn recipe(&self) -> Result<(Recipe, Settings)> {
        let c = self
            .construction
            .ok_or_else(|| anyhow!("--construction or --graph is required"))?;
        let k = self.k.ok_or_else(|| anyhow!("--k is required"))?;
        let mut settings = Settings {
            construction: c,
            k,
            p: None,
            eps: None,
            shaved: self.shaved,
            alpha: None,
            beta: None,
            x: None,
            weighted: self.weighted,
            clique_pad: self.clique_pad,
            graph_file: None,
        };
        if c == Construction::Spanner {
            if self.p.is_some() || self.eps.is_some() {
                bail!("spanner derives P from alpha, beta and x; drop --p/--eps");
            }
            let params = spanner_params(
                self.alpha.as_deref(),
                self.beta.as_deref(),
                self.x,
                self.weighted,
                self.clique_pad,
            )?;
            settings.alpha = Some(render_rational(&params.alpha));
            settings.beta = Some(render_rational(&params.beta));
            settings.x = Some(params.x);
            settings.p = Some(params.p()?);
            return Ok((Recipe::Spanner(params, k), settings));
        }
        if self.alpha.is_some() || self.beta.is_some() || self.x.is_some() || self.weighted || self.clique_pad.is_some() {
            bail!("--alpha/--beta/--x/--weighted/--clique-pad only apply to the spanner construction");
        }
        if self.shaved && !c.supports_shaved() {
            bail!("{c} has no shaved variant");
        }
        let p = match (&self.eps, self.p) {
            (Some(eps), _) => {
                let problem = stretch_problem(c).ok_or_else(|| anyhow!("{c} takes no --eps"))?;
                settings.eps = Some(eps.clone());
                Some(min_stretch_p(problem, rational("eps", eps)?)?)
            }
            (None, Some(_)) if !c.uses_p() => bail!("{c} takes no --p"),
            (None, p) => p,
        };
        let p = c.uses_p().then(|| p.unwrap_or(1));
        settings.p = p;
        let params = ConstructionParams::new(k).with_p(p.unwrap_or(1)).shaved(self.shaved);
        Ok((Recipe::Distance(c, params), settings))
    }

    fn density(&self) -> Result<Rational> {
        let d = rational("density", &self.density)?;
        if d < Rational::from_integer(0) || d > Rational::from_integer(1) {
            bail!("--density must lie in [0, 1]");
        }
        Ok(d)
    }

    /// Explicit `--sa/--sb`, if given.
    pub fn explicit_input(&self) -> Result<Option<(Bits, Bits)>> {
        match (&self.sa, &self.sb) {
            (Some(a), Some(b)) => Ok(Some((read_bits("sa", a)?, read_bits("sb", b)?))),
            _ => Ok(None),
        }
    }

    pub fn case_options(&self, trials: usize, exhaustive: bool) -> Result<CaseOptions> {
        Ok(CaseOptions {
            trials,
            seed: self.seed,
            density: self.density()?,
            exhaustive,
        })
    }

    /// One instance: from a graph file, from `--sa/--sb`, or from the first
    /// seeded random pair.
    pub fn single(&self) -> Result<(Instance, Settings, InputSource)> {
        if let Some(path) = &self.graph {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let inst = io::from_json(&text)?;
            let m = &inst.meta;
            let settings = Settings {
                construction: m.construction,
                k: m.k,
                p: m.p,
                eps: None,
                shaved: m.shaved,
                alpha: m.alpha.clone(),
                beta: m.beta.clone(),
                x: m.x,
                weighted: m.weighted,
                clique_pad: m.clique_pad,
                graph_file: Some(path.display().to_string()),
            };
            return Ok((inst, settings, InputSource::GraphFile));
        }
        let (recipe, settings) = self.recipe()?;
        let (sa, sb, source) = match self.explicit_input()? {
            Some((sa, sb)) => (sa, sb, InputSource::Flags),
            None => {
                let case = input_cases(recipe.input_len(), self.case_options(1, false)?)
                    .into_iter()
                    .next()
                    .expect("one random case");
                let source = InputSource::Random {
                    seed: self.seed,
                    density: render_rational(&self.density()?),
                };
                (case.sa, case.sb, source)
            }
        };
        Ok((recipe.build(sa, sb)?, settings, source))
    }
}

/// Parses a bit string, following `@path` indirection.
pub fn read_bits(flag: &str, text: &str) -> Result<Bits> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("--{flag}: reading {path}"))?,
        None => text.to_string(),
    };
    let cleaned: String = body.split_whitespace().collect();
    parse_bits(&cleaned).ok_or_else(|| anyhow!("--{flag}: expected 0/1 digits or 0x-prefixed hex"))
}
