//! Graph sources: inline generator specs, graph files and level lists.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use royden::graph::{parse_graph_file, Family, KillingRule};
use royden::{ExhaustionGenerator, Section};

use crate::error::CliError;

/// A parsed `family:key=value,...` string.
#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub generator: ExhaustionGenerator,
    /// Level named by `r=`, `depth=` or `n=`, if any.
    pub level: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_kv(body: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| {
            usage(format!(
                "expected key=value in generator spec, got {part:?}"
            ))
        })?;
        if map
            .insert(k.trim().to_string(), v.trim().to_string())
            .is_some()
        {
            return Err(usage(format!("key {k:?} given twice in generator spec")));
        }
    }
    Ok(map)
}

fn take_uint(
    map: &mut BTreeMap<String, String>,
    key: &str,
    min: usize,
) -> Result<Option<usize>, CliError> {
    let Some(raw) = map.remove(key) else {
        return Ok(None);
    };
    let v: usize = raw
        .parse()
        .map_err(|_| usage(format!("{key}={raw} is not a non-negative integer")))?;
    if v < min {
        return Err(usage(format!("{key} must be at least {min}, got {v}")));
    }
    Ok(Some(v))
}

pub fn parse_generator(spec: &str) -> Result<GeneratorSpec, CliError> {
    let (family, body) = spec.split_once(':').unwrap_or((spec, ""));
    let mut map = parse_kv(body)?;
    let killing = match map.remove("c") {
        None => KillingRule::Inherit,
        Some(raw) => {
            let c: f64 = raw
                .parse()
                .map_err(|_| usage(format!("c={raw} is not a number")))?;
            if !(c >= 0.0 && c.is_finite()) {
                return Err(usage(format!(
                    "c must be finite and non-negative, got {raw}"
                )));
            }
            KillingRule::Constant(c)
        }
    };
    let (generator, level) = match family {
        "lattice" => {
            let d =
                take_uint(&mut map, "d", 1)?.ok_or_else(|| usage("lattice needs d=<dimension>"))?;
            let r = take_uint(&mut map, "r", 1)?;
            (ExhaustionGenerator::lattice(d)?, r)
        }
        "tree" => {
            let k = take_uint(&mut map, "k", 3)?.ok_or_else(|| usage("tree needs k=<degree>"))?;
            let depth = take_uint(&mut map, "depth", 1)?;
            (ExhaustionGenerator::tree(k)?, depth)
        }
        "ball" => {
            let file = map
                .remove("file")
                .ok_or_else(|| usage("ball needs file=<graph file>"))?;
            let base = read_graph(Path::new(&file))?;
            let root = map
                .remove("root")
                .ok_or_else(|| usage("ball needs root=<vertex>"))?;
            let root = base.resolve(&root)?;
            let n = take_uint(&mut map, "n", 1)?;
            (ExhaustionGenerator::ball(base, root)?, n)
        }
        other => {
            return Err(usage(format!(
                "unknown generator family {other:?} (lattice, tree, ball)"
            )))
        }
    };
    if let Some(key) = map.keys().next() {
        return Err(usage(format!("unknown key {key:?} for {family} generator")));
    }
    Ok(GeneratorSpec {
        generator: generator.with_killing(killing)?,
        level,
    })
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
}

pub fn read_graph(path: &Path) -> Result<Section, CliError> {
    Ok(parse_graph_file(&read_text(path)?)?)
}

/// `a:b`, `a:b:step` or `a,b,c`; strictly increasing positive integers.
pub fn parse_levels(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || {
        usage(format!(
            "bad level list {text:?}; use a:b, a:b:step or a,b,c"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let levels: Vec<usize> = match parts.as_slice() {
        [single] => single
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?,
        [a, b] | [a, b, _] => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim().parse().map_err(|_| bad())?;
            let step: usize = match parts.get(2) {
                Some(s) => s.trim().parse().map_err(|_| bad())?,
                None => 1,
            };
            if step == 0 {
                return Err(bad());
            }
            (a..=b).step_by(step).collect()
        }
        _ => return Err(bad()),
    };
    if levels.is_empty() || levels[0] == 0 || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(usage(format!(
            "levels must be positive and strictly increasing: {text:?}"
        )));
    }
    Ok(levels)
}

/// Levels used when none are given: sizes where each family shows its
/// asymptotics at desk scale.
pub fn default_levels(gen: &ExhaustionGenerator) -> Vec<usize> {
    match gen.family() {
        Family::Lattice { dim: 1 } => (2..=64).collect(),
        Family::Lattice { dim: 2 } => vec![8, 11, 16, 23, 32, 45, 64, 91, 128],
        Family::Lattice { dim: 3 } => (4..=20).collect(),
        Family::Lattice { .. } => (2..=8).collect(),
        Family::Tree { .. } => (2..=10).collect(),
        Family::Ball { .. } => (1..=8).collect(),
    }
}

/// Where the graph comes from.
#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Generator(String),
}

impl Source {
    pub fn describe(&self) -> String {
        match self {
            Source::File(p) => format!("file:{}", p.display()),
            Source::Generator(g) => g.clone(),
        }
    }

    /// The single section a command runs on, plus its level when generated.
    pub fn section(&self) -> Result<(Section, Option<usize>), CliError> {
        match self {
            Source::File(path) => Ok((read_graph(path)?, None)),
            Source::Generator(text) => {
                let spec = parse_generator(text)?;
                let n = spec.level.ok_or_else(|| {
                    usage(format!("{text:?} names no level; add r=, depth= or n="))
                })?;
                Ok((spec.generator.level(n)?, Some(n)))
            }
        }
    }

    /// An exhaustion. Graph files are exhausted by balls around `root`.
    pub fn exhaustion(&self, root: Option<&str>) -> Result<ExhaustionGenerator, CliError> {
        match self {
            Source::Generator(text) => Ok(parse_generator(text)?.generator),
            Source::File(path) => {
                let base = read_graph(path)?;
                let root =
                    root.ok_or_else(|| usage("exhausting a graph file needs --vertex <root>"))?;
                let v = base.resolve(root)?;
                Ok(ExhaustionGenerator::ball(base, v)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("2:5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_levels("8:128:40").unwrap(), vec![8, 48, 88, 128]);
        assert_eq!(parse_levels("2,4,8").unwrap(), vec![2, 4, 8]);
        for bad in ["", "0:4", "4,2", "1:2:0", "a:b", "1:2:3:4"] {
            assert!(
                matches!(parse_levels(bad), Err(CliError::Usage(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn generator_specs() {
        let g = parse_generator("lattice:d=3,r=8").unwrap();
        assert_eq!(
            (g.generator.name(), g.level),
            ("lattice:d=3".to_string(), Some(8))
        );
        let g = parse_generator("tree:k=3,depth=5,c=0.5").unwrap();
        assert_eq!(g.generator.killing_rule(), KillingRule::Constant(0.5));
        for bad in [
            "lattice:d=0",
            "lattice",
            "tree:k=2",
            "torus:d=2",
            "lattice:d=2,q=1",
            "lattice:d=2,c=-1",
        ] {
            assert!(
                matches!(parse_generator(bad), Err(CliError::Usage(_))),
                "{bad}"
            );
        }
    }
}
