//! Versioned text formats: the code file and the shares file.
//!
//! Both are UTF-8, one item per line, `#` starting a comment. Keys are
//! closed sets; an unknown key is an error rather than an extension point.

use std::collections::BTreeMap;
use std::hash::Hasher;

use fnv::FnvHasher;

use crate::channel::ChannelModel;
use crate::construction::{join, CodeSpec};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::sharing::{Dealing, Role, Share};

pub const CODE_MAGIC: &str = "POLARSS-CODE v1";
pub const SHARES_MAGIC: &str = "POLARSS-SHARES v1";

/// Canonical code file text. Reliabilities carry six decimals.
pub fn write_code(spec: &CodeSpec) -> String {
    let reliability: Vec<String> = spec
        .reliability()
        .iter()
        .map(|r| format!("{r:.6}"))
        .collect();
    format!(
        "{CODE_MAGIC}\nchannel = {}\nn = {}\nk = {}\nA = {}\np = {}\nfrozen_values = {}\nreliability = {}\n",
        spec.channel(),
        spec.exponent(),
        spec.dimension(),
        join(spec.information_set()),
        spec.secret_position(),
        spec.frozen_values(),
        reliability.join(","),
    )
}

/// FNV-1a 64 over the canonical code file bytes.
pub fn code_digest(spec: &CodeSpec) -> u64 {
    let mut hasher = FnvHasher::default();
    hasher.write(write_code(spec).as_bytes());
    hasher.finish()
}

pub fn digest_hex(digest: u64) -> String {
    format!("{digest:016x}")
}

/// Meaningful lines with their 1-based line numbers, comments stripped.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn expect_magic<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, magic: &str) -> Result<()> {
    match lines.next() {
        Some((_, line)) if line == magic => Ok(()),
        Some((n, line)) => Err(Error::format(
            n,
            format!("expected {magic:?}, found {line:?}"),
        )),
        None => Err(Error::format(1, format!("empty file, expected {magic:?}"))),
    }
}

fn parse_num<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::format(line, format!("bad value {value:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<Vec<T>> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|v| parse_num(line, key, v.trim()))
        .collect()
}

pub fn read_code(text: &str) -> Result<CodeSpec> {
    const KEYS: [&str; 7] = [
        "channel",
        "n",
        "k",
        "A",
        "p",
        "frozen_values",
        "reliability",
    ];
    let mut lines = content_lines(text);
    expect_magic(&mut lines, CODE_MAGIC)?;
    let mut fields: BTreeMap<&str, (usize, &str)> = BTreeMap::new();
    for (n, line) in lines {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::format(n, format!("expected key = value, found {line:?}")))?;
        let key = key.trim();
        let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
            return Err(Error::format(n, format!("unknown key {key:?}")));
        };
        if fields.insert(known, (n, value.trim())).is_some() {
            return Err(Error::format(n, format!("duplicate key {key:?}")));
        }
    }
    let field = |key: &str| {
        fields
            .get(key)
            .copied()
            .ok_or_else(|| Error::format(0, format!("missing key {key:?}")))
    };

    let (ln, v) = field("channel")?;
    let channel: ChannelModel = v.parse().map_err(|e| Error::format(ln, format!("{e}")))?;
    let (ln, v) = field("n")?;
    let n: u32 = parse_num(ln, "n", v)?;
    let (ln, v) = field("k")?;
    let k: usize = parse_num(ln, "k", v)?;
    let (ln, v) = field("A")?;
    let info_set: Vec<usize> = parse_list(ln, "A", v)?;
    if info_set.len() != k || info_set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::format(
            ln,
            format!("A must list {k} ascending indices"),
        ));
    }
    let (ln, v) = field("p")?;
    let p: usize = parse_num(ln, "p", v)?;
    let (ln, v) = field("frozen_values")?;
    let frozen_values: BitVector = v.parse().map_err(|e| Error::format(ln, format!("{e}")))?;
    let (ln, v) = field("reliability")?;
    let reliability: Vec<f64> = parse_list(ln, "reliability", v)?;

    CodeSpec::from_parts(channel, n, info_set, p, reliability, frozen_values)
}

/// Contents of a shares file: a whole dealing, one member's share, or the
/// public values, depending on which lines are present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SharesFile {
    pub code_digest: u64,
    pub p: usize,
    pub public_values: Vec<Share>,
    pub member_shares: Vec<Share>,
}

impl SharesFile {
    pub fn from_dealing(d: &Dealing) -> Self {
        SharesFile {
            code_digest: d.code_digest,
            p: d.p,
            public_values: d.public_values.clone(),
            member_shares: d.member_shares.clone(),
        }
    }

    /// File for a single member holding the share at `position`.
    pub fn for_member(d: &Dealing, position: usize) -> Option<Self> {
        let share = d.member_share(position)?;
        Some(SharesFile {
            code_digest: d.code_digest,
            p: d.p,
            public_values: Vec::new(),
            member_shares: vec![share],
        })
    }

    pub fn public_only(d: &Dealing) -> Self {
        SharesFile {
            code_digest: d.code_digest,
            p: d.p,
            public_values: d.public_values.clone(),
            member_shares: Vec::new(),
        }
    }

    /// Fails unless the file was dealt for `spec`.
    pub fn check_against(&self, spec: &CodeSpec) -> Result<()> {
        let expected = code_digest(spec);
        if self.code_digest != expected {
            return Err(Error::DigestMismatch {
                expected: digest_hex(expected),
                found: digest_hex(self.code_digest),
            });
        }
        if self.p != spec.secret_position() {
            return Err(Error::Argument(format!(
                "shares are for p = {}, code has p = {}",
                self.p,
                spec.secret_position()
            )));
        }
        Ok(())
    }

    /// Merges files of one dealing; conflicting duplicates are an integrity
    /// error.
    pub fn merge(files: &[SharesFile]) -> Result<SharesFile> {
        let first = files
            .first()
            .ok_or_else(|| Error::Argument("no shares files given".into()))?;
        let mut public: BTreeMap<usize, Share> = BTreeMap::new();
        let mut members: BTreeMap<usize, Share> = BTreeMap::new();
        for f in files {
            if f.code_digest != first.code_digest {
                return Err(Error::DigestMismatch {
                    expected: digest_hex(first.code_digest),
                    found: digest_hex(f.code_digest),
                });
            }
            if f.p != first.p {
                return Err(Error::Argument("shares files disagree on p".into()));
            }
            for (target, shares) in [
                (&mut public, &f.public_values),
                (&mut members, &f.member_shares),
            ] {
                for s in shares {
                    match target.insert(s.position, *s) {
                        Some(prev) if prev.bit != s.bit => return Err(Error::Integrity),
                        _ => {}
                    }
                }
            }
        }
        Ok(SharesFile {
            code_digest: first.code_digest,
            p: first.p,
            public_values: public.into_values().collect(),
            member_shares: members.into_values().collect(),
        })
    }
}

pub fn write_shares(file: &SharesFile) -> String {
    let mut out = format!(
        "{SHARES_MAGIC}\ncode_digest = {}\np = {}\n",
        digest_hex(file.code_digest),
        file.p
    );
    for s in &file.public_values {
        out.push_str(&format!("public {} {}\n", s.position, u8::from(s.bit)));
    }
    for s in &file.member_shares {
        out.push_str(&format!("share {} {}\n", s.position, u8::from(s.bit)));
    }
    out
}

pub fn read_shares(text: &str) -> Result<SharesFile> {
    let mut lines = content_lines(text);
    expect_magic(&mut lines, SHARES_MAGIC)?;
    let mut digest = None;
    let mut p = None;
    let mut public_values = Vec::new();
    let mut member_shares = Vec::new();
    for (n, line) in lines {
        if let Some((key, value)) = line.split_once('=') {
            let (key, value) = (key.trim(), value.trim());
            match key {
                "code_digest" if digest.is_none() => {
                    if value.len() != 16 {
                        return Err(Error::format(n, "code_digest must be 16 hex characters"));
                    }
                    digest = Some(
                        u64::from_str_radix(value, 16)
                            .map_err(|_| Error::format(n, format!("bad digest {value:?}")))?,
                    );
                }
                "p" if p.is_none() => p = Some(parse_num::<usize>(n, "p", value)?),
                "code_digest" | "p" => {
                    return Err(Error::format(n, format!("duplicate key {key:?}")))
                }
                other => return Err(Error::format(n, format!("unknown key {other:?}"))),
            }
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        let [kind, pos, bit] = parts[..] else {
            return Err(Error::format(
                n,
                format!("expected '<share|public> <position> <bit>', found {line:?}"),
            ));
        };
        let role = match kind {
            "share" => Role::Member,
            "public" => Role::Public,
            other => return Err(Error::format(n, format!("unknown line kind {other:?}"))),
        };
        let position: usize = parse_num(n, "position", pos)?;
        let bit = match bit {
            "0" => false,
            "1" => true,
            other => return Err(Error::format(n, format!("bad bit {other:?}"))),
        };
        let share = Share {
            position,
            bit,
            role,
        };
        match role {
            Role::Member => member_shares.push(share),
            Role::Public => public_values.push(share),
        }
    }
    Ok(SharesFile {
        code_digest: digest.ok_or_else(|| Error::format(0, "missing code_digest"))?,
        p: p.ok_or_else(|| Error::format(0, "missing p"))?,
        public_values,
        member_shares,
    })
}
