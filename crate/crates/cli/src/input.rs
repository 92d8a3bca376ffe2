use std::fs;
use std::path::{Path, PathBuf};

use hvb::exactla::RatMat;
use hvb::fixtures;
use hvb::groupoid::FinGroupoid;
use hvb::ruth::{GradedBundle, Ruth};
use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::report::Input;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {detail}")]
    Parse { path: String, detail: String },
    #[error("{0}")]
    Invalid(String),
}

/// Resolves relative paths against the fixture directory when they are not found as given.
#[derive(Clone, Debug, Default)]
pub struct Loader {
    pub fixture_dir: Option<PathBuf>,
}

impl Loader {
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_relative() && !path.exists() {
            if let Some(dir) = &self.fixture_dir {
                let alt = dir.join(path);
                if alt.exists() {
                    return alt;
                }
            }
        }
        path.to_path_buf()
    }

    /// Parse a JSON document; errors name the failing field path and the line and column.
    pub fn load<T: DeserializeOwned>(&self, path: &Path) -> Result<(T, Input), InputError> {
        let shown = path.display().to_string();
        let text = fs::read_to_string(self.resolve(path)).map_err(|source| InputError::Io { path: shown.clone(), source })?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        let doc = serde_path_to_error::deserialize(de).map_err(|e| {
            let field = e.path().to_string();
            let detail = if field == "." { e.inner().to_string() } else { format!("at field {field}: {}", e.inner()) };
            InputError::Parse { path: shown.clone(), detail }
        })?;
        Ok((doc, Input { name: shown, sha256: digest(text.as_bytes()) }))
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn write_json(path: &Path, doc: &impl Serialize) -> Result<(), InputError> {
    let text = serde_json::to_string_pretty(doc).expect("documents serialize") + "\n";
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    fs::write(path, text).map_err(|source| InputError::Io { path: path.display().to_string(), source })
}

/// Seed of the standard fixture sweep shared with the acceptance run.
pub const SWEEP_SEED: u64 = 20_240_517;

pub const BUILTINS: &str = "sign, trivial:<groupoid>, unit-chain, sweep:<k>";

/// Named representations: `sign` (ℤ/2 on ℚ by −1), `trivial:<groupoid>` (ℚ with identities),
/// `unit-chain` (a three-term complex over one object), `sweep:<k>` (fixture `k` of the standard sweep).
pub fn builtin_ruth(name: &str) -> Result<Ruth, InputError> {
    let unknown = || InputError::Invalid(format!("unknown builtin {name:?}; known: {BUILTINS}"));
    if name == "sign" {
        return Ok(fixtures::sign_rep(1));
    }
    if name == "unit-chain" {
        let mut r = Ruth::zero(&FinGroupoid::unit(1), GradedBundle::uniform(1, &[1, 2, 1])).expect("one object");
        r.set_block(0, 0, 1, RatMat::from_ints(&[&[1, 0]])).expect("shape");
        r.set_block(0, 0, 2, RatMat::from_ints(&[&[0], &[1]])).expect("shape");
        return Ok(r);
    }
    if let Some(g) = name.strip_prefix("trivial:") {
        let g = FinGroupoid::builtin(g).ok_or_else(unknown)?;
        return Ok(fixtures::trivial_rep(&g, 1));
    }
    if let Some(k) = name.strip_prefix("sweep:") {
        let k: usize = k.parse().map_err(|_| unknown())?;
        return Ok(fixtures::sweep(SWEEP_SEED, k + 1).pop().expect("nonempty sweep").ruth);
    }
    Err(unknown())
}

/// The builtin as an input record, digested through its canonical document.
pub fn builtin_input(name: &str, r: &Ruth) -> Input {
    let text = serde_json::to_string(&r.to_doc()).expect("documents serialize");
    Input { name: format!("builtin:{name}"), sha256: digest(text.as_bytes()) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_are_valid() {
        for name in ["sign", "unit-chain", "trivial:pair(2)", "sweep:0", "sweep:9"] {
            let r = builtin_ruth(name).unwrap();
            assert!(r.validate(None).is_ok(), "{name}");
        }
        assert!(builtin_ruth("sweep:x").is_err());
        assert!(builtin_ruth("trivial:nope").is_err());
    }

    #[test]
    fn digest_is_sha256() {
        assert_eq!(digest(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
