//! Instance descriptors such as `hamming:3,5,5:2` or `planted:5,20,0.9,0.05:1`.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use flipcc::generators::{gen_hamming, gen_planted, gnp};
use flipcc::Graph;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct Instance {
    pub graph: Graph,
    /// Canonical descriptor, or `sha256:<hex>` for files.
    pub descriptor: String,
    /// Grid dimensions for Hamming instances.
    pub dims: Option<Vec<usize>>,
}

fn list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|_| anyhow!("bad {what} value {x:?}")))
        .collect()
}

fn exactly<T: Clone>(v: Vec<T>, k: usize, what: &str) -> Result<Vec<T>> {
    if v.len() != k {
        bail!("{what} expects {k} values, got {}", v.len());
    }
    Ok(v)
}

pub fn generate(desc: &str) -> Result<Instance> {
    let parts: Vec<&str> = desc.split(':').collect();
    let (graph, dims) = match parts.as_slice() {
        ["hamming", dims, radius] => {
            let dims: Vec<usize> = list(dims, "dimension")?;
            let radius: usize = radius.parse().context("bad radius")?;
            (gen_hamming(&dims, radius)?, Some(dims))
        }
        ["planted", args, seed] => {
            let a: Vec<f64> = exactly(list(args, "planted")?, 4, "planted")?;
            if a[0].fract() != 0.0 || a[1].fract() != 0.0 || a[0] < 0.0 || a[1] < 0.0 {
                bail!("planted block count and size must be nonnegative integers");
            }
            let seed: u64 = seed.parse().context("bad seed")?;
            (gen_planted(a[0] as usize, a[1] as usize, a[2], a[3], seed)?.0, None)
        }
        ["cliques", sizes] => (Graph::disjoint_cliques(&list::<usize>(sizes, "clique size")?), None),
        ["gnp", args, seed] => {
            let a: Vec<&str> = exactly(args.split(',').collect(), 2, "gnp")?;
            let n: usize = a[0].parse().context("bad n")?;
            let p: f64 = a[1].parse().context("bad p")?;
            (gnp(n, p, seed.parse().context("bad seed")?)?, None)
        }
        ["file", path] => return load(Path::new(path)),
        _ => bail!("unknown instance descriptor {desc:?}"),
    };
    Ok(Instance { graph, descriptor: desc.to_string(), dims })
}

pub fn load(path: &Path) -> Result<Instance> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let graph = Graph::read(BufReader::new(&bytes[..]))
        .with_context(|| format!("cannot parse {}", path.display()))?;
    let digest = Sha256::digest(&bytes);
    Ok(Instance { graph, descriptor: format!("sha256:{}", hex::encode(digest)), dims: None })
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).with_context(|| format!("cannot open {}", path.display()))?))
}
