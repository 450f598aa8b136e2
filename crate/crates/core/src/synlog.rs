//! Phase two: template identification for an already-formed group.
//!
//! For each group: sample representative contents, anonymize them, keep the
//! tokens that form a longest common subsequence of all representatives,
//! demote any kept constant that is missing from some member, then collapse
//! marker runs and strip stray punctuation around markers.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::anonymize::RegexRuleSet;
use crate::error::{Error, Result};
use crate::metrics::ParseResult;
use crate::model::{tokenize, LogGroup, Template, Token, MARKER};

/// How many representatives to draw per group, and from which seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub k: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig { k: 2, seed: 42 }
    }
}

impl SamplerConfig {
    pub fn new(k: usize, seed: u64) -> Result<Self> {
        let cfg = SamplerConfig { k, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig(
                "at least two representative logs are required".into(),
            ));
        }
        Ok(())
    }
}

/// Characters that may cling to a marker inside a constant token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StraySymbols(Vec<char>);

impl Default for StraySymbols {
    fn default() -> Self {
        StraySymbols(vec![
            '/', '#', ':', '=', ',', ';', '(', ')', '[', ']', '<', '>', '"', '\'',
        ])
    }
}

impl StraySymbols {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Self {
        StraySymbols(symbols.into_iter().collect())
    }

    pub fn contains(&self, c: char) -> bool {
        self.0.contains(&c)
    }

    /// True for tokens like `/<*>` or `(<*>)`: at least one marker, and
    /// nothing but stray symbols around it.
    pub fn is_decorated_marker(&self, text: &str) -> bool {
        text != MARKER
            && text.contains(MARKER)
            && text
                .split(MARKER)
                .all(|piece| piece.chars().all(|c| self.contains(c)))
    }
}

/// Draws `min(k, unique)` distinct contents. A group with a single unique
/// content yields that content twice.
pub fn sample_representatives<'g>(group: &'g LogGroup, cfg: &SamplerConfig) -> Vec<&'g str> {
    let unique = &group.unique_contents;
    match unique.len() {
        0 => Vec::new(),
        1 => vec![unique[0].as_str(), unique[0].as_str()],
        n => {
            let mut rng = ChaCha8Rng::seed_from_u64(group_seed(cfg.seed, group.id.0));
            index::sample(&mut rng, n, cfg.k.min(n))
                .into_iter()
                .map(|i| unique[i].as_str())
                .collect()
        }
    }
}

fn group_seed(seed: u64, group: u32) -> u64 {
    seed ^ u64::from(group).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Indices into `a` of a longest common subsequence of `a` and `b`.
///
/// Among optimal subsequences the one matching earliest in `a` is chosen.
pub fn lcs_indices<A, B>(a: &[A], b: &[B], eq: impl Fn(&A, &B) -> bool) -> Vec<usize> {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    // suffix table: dp[i * width + j] = LCS length of a[i..] and b[j..]
    let mut dp = vec![0u32; (n + 1) * width];
    for i in (0..n).rev() {
        for j in (0..m).rev() {
            dp[i * width + j] = if eq(&a[i], &b[j]) {
                dp[(i + 1) * width + j + 1] + 1
            } else {
                dp[(i + 1) * width + j].max(dp[i * width + j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(dp[0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < m {
        if eq(&a[i], &b[j]) {
            out.push(i);
            i += 1;
            j += 1;
        } else if dp[(i + 1) * width + j] >= dp[i * width + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// Keeps the tokens of the first representative that lie on the common
/// subsequence of all representatives; every other position becomes a
/// marker. Existing markers match each other like ordinary tokens.
pub fn identify_template(reps: &[Vec<Token>]) -> Template {
    let Some((first, rest)) = reps.split_first() else {
        return Template::default();
    };
    let mut kept: Vec<usize> = (0..first.len()).collect();
    for other in rest {
        let common = lcs_indices(&kept, other, |&i, tok| first[i] == *tok);
        kept = common.into_iter().map(|c| kept[c]).collect();
    }
    let mut keep = vec![false; first.len()];
    for i in kept {
        keep[i] = true;
    }
    first
        .iter()
        .zip(keep)
        .map(|(tok, k)| if k { tok.clone() } else { Token::Variable })
        .collect::<Vec<_>>()
        .into()
}

/// Demotes every constant that is absent from at least one member's token
/// sequence. Presence only; position and order are not checked.
pub fn verify_constants<I, S>(template: Template, members: I) -> Template
where
    I: IntoIterator<Item = S>,
    S: AsRef<[Token]>,
{
    let mut check = PresenceCheck::new(&template);
    for member in members {
        check.retain_present(|| member.as_ref().iter().map(Token::text));
    }
    let alive = check.into_mask();
    apply_mask(template, &alive)
}

/// Same as [`verify_constants`] over raw contents.
///
/// Anonymization depends only on a token's text and a kept constant is by
/// construction a text that anonymization leaves alone, so a constant occurs
/// in a raw content iff it occurs in the anonymized one.
pub fn verify_constants_in_contents<S: AsRef<str>>(template: Template, contents: &[S]) -> Template {
    let mut check = PresenceCheck::new(&template);
    for content in contents {
        check.retain_present(|| content.as_ref().split_ascii_whitespace());
    }
    let alive = check.into_mask();
    apply_mask(template, &alive)
}

struct PresenceCheck<'t> {
    /// Surviving constants as (template position, text), in template order.
    pending: Vec<(usize, &'t str)>,
    seen: Vec<bool>,
    len: usize,
}

impl<'t> PresenceCheck<'t> {
    fn new(template: &'t Template) -> Self {
        let pending: Vec<(usize, &str)> = template
            .tokens()
            .iter()
            .enumerate()
            .filter_map(|(i, t)| match t {
                Token::Constant(s) => Some((i, s.as_str())),
                Token::Variable => None,
            })
            .collect();
        PresenceCheck {
            seen: vec![false; pending.len()],
            pending,
            len: template.len(),
        }
    }

    fn retain_present<'m, F, It>(&mut self, member: F)
    where
        F: Fn() -> It,
        It: Iterator<Item = &'m str>,
    {
        if self.pending.is_empty() {
            return;
        }
        // members usually carry the constants in template order
        let mut next = 0;
        for text in member() {
            if self.pending[next].1 == text {
                next += 1;
                if next == self.pending.len() {
                    return;
                }
            }
        }
        self.seen.iter_mut().for_each(|s| *s = false);
        let mut missing = self.pending.len();
        for text in member() {
            for (p, seen) in self.pending.iter().zip(self.seen.iter_mut()) {
                if !*seen && p.1 == text {
                    *seen = true;
                    missing -= 1;
                }
            }
            if missing == 0 {
                return;
            }
        }
        let mut seen = self.seen.iter();
        self.pending.retain(|_| *seen.next().expect("same length"));
        self.seen.truncate(self.pending.len());
    }

    fn into_mask(self) -> Vec<bool> {
        let mut alive = vec![false; self.len];
        for (i, _) in self.pending {
            alive[i] = true;
        }
        alive
    }
}

fn apply_mask(template: Template, alive: &[bool]) -> Template {
    template
        .into_tokens()
        .into_iter()
        .zip(alive)
        .map(|(tok, &a)| if a { tok } else { Token::Variable })
        .collect::<Vec<_>>()
        .into()
}

/// Turns stray-decorated markers into bare markers, then collapses runs of
/// adjacent markers. The result is canonical.
pub fn postprocess(template: Template, stray: &StraySymbols) -> Template {
    let tokens: Vec<Token> = template
        .into_tokens()
        .into_iter()
        .map(|tok| match tok {
            Token::Constant(ref s) if stray.is_decorated_marker(s) => Token::Variable,
            other => other,
        })
        .collect();
    Template::new(tokens).collapse_markers()
}

/// Template identification settings bundled together.
#[derive(Debug, Clone, Default)]
pub struct Refiner {
    pub rules: RegexRuleSet,
    pub sampler: SamplerConfig,
    pub stray: StraySymbols,
}

impl Refiner {
    pub fn new(rules: RegexRuleSet, sampler: SamplerConfig) -> Self {
        Refiner {
            rules,
            sampler,
            stray: StraySymbols::default(),
        }
    }

    /// Runs the whole identification pipeline for one group.
    pub fn refine_group(&self, group: &LogGroup) -> Result<Template> {
        let reps = sample_representatives(group, &self.sampler);
        let mut anonymized: Vec<Vec<Token>> = Vec::with_capacity(reps.len());
        for (i, rep) in reps.iter().enumerate() {
            // a singleton group repeats its content; anonymize it once
            let cached = reps[..i].iter().position(|r| r == rep);
            let tokens = match cached {
                Some(j) => anonymized[j].clone(),
                None => self.rules.anonymize(&tokenize(rep)?),
            };
            anonymized.push(tokens);
        }
        let template = identify_template(&anonymized);
        let template = verify_constants_in_contents(template, &group.unique_contents);
        Ok(postprocess(template, &self.stray))
    }

    /// Assigns a template to every group. Membership is left untouched.
    pub fn refine_groups(&self, groups: &mut [LogGroup]) -> Result<()> {
        for group in groups.iter_mut() {
            group.template = Some(self.refine_group(group)?);
        }
        Ok(())
    }
}

/// Assigns templates to `groups` and maps every member line to its
/// group's rendered template.
pub fn refine_groups(
    groups: &mut [LogGroup],
    rules: &RegexRuleSet,
    cfg: &SamplerConfig,
) -> Result<ParseResult> {
    cfg.validate()?;
    let refiner = Refiner::new(rules.clone(), *cfg);
    refiner.refine_groups(groups)?;
    Ok(ParseResult::from_groups(groups))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GroupId;
    use alloc::string::{String, ToString};

    fn toks(s: &str) -> Vec<Token> {
        tokenize(s).unwrap()
    }

    fn tpl(s: &str) -> Template {
        Template::parse(s).unwrap()
    }

    fn group(id: u32, contents: &[&str]) -> LogGroup {
        let mut unique: Vec<String> = Vec::new();
        for c in contents {
            if !unique.iter().any(|u| u == c) {
                unique.push(c.to_string());
            }
        }
        LogGroup {
            id: GroupId(id),
            member_ids: (1..=contents.len() as u64).collect(),
            unique_contents: unique,
            draft: tpl(contents[0]),
            template: None,
        }
    }

    #[test]
    fn sampler_k_must_be_two() {
        assert!(SamplerConfig::new(1, 0).is_err());
        assert!(SamplerConfig::new(0, 0).is_err());
        assert!(SamplerConfig::new(2, 0).is_ok());
    }

    #[test]
    fn sample_singleton_repeats() {
        let g = group(0, &["A", "A", "A"]);
        assert_eq!(
            sample_representatives(&g, &SamplerConfig::default()),
            ["A", "A"]
        );
    }

    #[test]
    fn sample_pair_is_forced() {
        let g = group(0, &["A", "B"]);
        let mut reps = sample_representatives(&g, &SamplerConfig::default());
        reps.sort();
        assert_eq!(reps, ["A", "B"]);
    }

    #[test]
    fn sample_is_deterministic_and_distinct() {
        let g = group(3, &["a 1", "a 2", "a 3", "a 4", "a 5"]);
        for seed in [0, 7, 42, u64::MAX] {
            let cfg = SamplerConfig { k: 2, seed };
            let first = sample_representatives(&g, &cfg);
            assert_eq!(first.len(), 2);
            assert_ne!(first[0], first[1]);
            for _ in 0..5 {
                assert_eq!(sample_representatives(&g, &cfg), first);
            }
        }
        let cfg = SamplerConfig { k: 9, seed: 1 };
        assert_eq!(sample_representatives(&g, &cfg).len(), 5);
    }

    #[test]
    fn lcs_basic() {
        let a = ['a', 'b', 'c', 'b', 'd'];
        let b = ['b', 'd', 'c', 'b'];
        let idx = lcs_indices(&a, &b, |x, y| x == y);
        let got: String = idx.iter().map(|&i| a[i]).collect();
        assert_eq!(got, "bcb");
        // earliest match in `a` wins among ties
        let idx = lcs_indices(&['x', 'x'], &['x'], |x, y| x == y);
        assert_eq!(idx, [0]);
        assert!(lcs_indices::<char, char>(&[], &['a'], |x, y| x == y).is_empty());
    }

    #[test]
    fn identify_examples() {
        let t = identify_template(&[
            toks("Connection from <*> closed"),
            toks("Connection from host7 closed"),
        ]);
        assert_eq!(t.to_string(), "Connection from <*> closed");

        let x = toks("same tokens here");
        assert_eq!(
            identify_template(&[x.clone(), x]).to_string(),
            "same tokens here"
        );

        assert_eq!(
            identify_template(&[toks("a b"), toks("c d")]).to_string(),
            "<*> <*>"
        );
    }

    #[test]
    fn identify_folds_over_all_representatives() {
        let t = identify_template(&[toks("a b c d"), toks("a x c d"), toks("a b c y")]);
        assert_eq!(t.to_string(), "a <*> c <*>");
    }

    #[test]
    fn verify_examples() {
        let t = tpl("Connection from <*> closed");
        let members = [
            toks("Connection from <*> closed"),
            toks("Connection from <*> closed"),
            toks("Connection from <*> dropped"),
        ];
        assert_eq!(
            verify_constants(t.clone(), &members).to_string(),
            "Connection from <*> <*>"
        );
        assert_eq!(verify_constants(t.clone(), &members[..2]), t);
        let all = tpl("<*> <*>");
        assert_eq!(verify_constants(all.clone(), &members), all);
    }

    #[test]
    fn verify_raw_matches_anonymized() {
        let rules = RegexRuleSet::default();
        let contents = [
            "got 12 from 10.0.0.1 ok",
            "got 7 from 10.0.0.2 fine",
            "got 9 via x ok",
        ];
        let t = tpl("got <*> from <*> ok");
        let anon: Vec<Vec<Token>> = contents.iter().map(|c| rules.anonymize(&toks(c))).collect();
        let a = verify_constants(t.clone(), &anon);
        let b = verify_constants_in_contents(t, &contents);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "got <*> <*> <*> <*>");
    }

    #[test]
    fn postprocess_examples() {
        let s = StraySymbols::default();
        assert_eq!(
            postprocess(tpl("Connection from <*> <*>"), &s).to_string(),
            "Connection from <*>"
        );
        assert_eq!(postprocess(tpl("/<*>"), &s).to_string(), "<*>");
        assert_eq!(postprocess(tpl("a b c"), &s).to_string(), "a b c");
        assert_eq!(
            postprocess(tpl("x #<*> (<*>) <*>: y"), &s).to_string(),
            "x <*> y"
        );
        assert_eq!(
            postprocess(tpl("blk_<*> <*>.log"), &s).to_string(),
            "blk_<*> <*>.log"
        );
    }

    #[test]
    fn decorated_marker_detection() {
        let s = StraySymbols::default();
        for yes in [
            "/<*>", "<*>/", "#<*>", "(<*>)", "[<*>],", "<*>:<*>", "\"<*>\"", "<<*>>",
        ] {
            assert!(s.is_decorated_marker(yes), "{yes}");
        }
        for no in ["<*>", "/", "a<*>", "<*>.", "blk_<*>", ""] {
            assert!(!s.is_decorated_marker(no), "{no}");
        }
        let custom = StraySymbols::new(['.']);
        assert!(custom.is_decorated_marker("<*>."));
    }

    #[test]
    fn refine_broadcast_group() {
        let mut groups = vec![group(
            0,
            &[
                "Reading broadcast variable 11 took 15 ms",
                "Reading broadcast variable 12 took 9 ms",
            ],
        )];
        let result = refine_groups(
            &mut groups,
            &RegexRuleSet::default(),
            &SamplerConfig::default(),
        )
        .unwrap();
        assert_eq!(
            groups[0].template.as_ref().unwrap().to_string(),
            "Reading broadcast variable <*> took <*> ms"
        );
        assert_eq!(
            result.get(1),
            Some("Reading broadcast variable <*> took <*> ms")
        );
        assert_eq!(
            result.get(2),
            Some("Reading broadcast variable <*> took <*> ms")
        );
    }

    #[test]
    fn refine_singleton_keeps_words() {
        let r = Refiner::default();
        assert_eq!(
            r.refine_group(&group(0, &["node down"]))
                .unwrap()
                .to_string(),
            "node down"
        );
    }

    #[test]
    fn refine_connection_group() {
        let g = group(
            0,
            &[
                "Connection from 10.0.0.1 closed",
                "Connection from host7 closed",
                "Connection from 10.0.0.9 dropped",
            ],
        );
        for seed in 0..20 {
            let r = Refiner::new(RegexRuleSet::default(), SamplerConfig { k: 2, seed });
            assert_eq!(
                r.refine_group(&g).unwrap().to_string(),
                "Connection from <*>"
            );
        }
    }

    #[test]
    fn refine_rejects_bad_sampler() {
        let mut groups = vec![group(0, &["a"])];
        let cfg = SamplerConfig { k: 1, seed: 0 };
        assert!(refine_groups(&mut groups, &RegexRuleSet::default(), &cfg).is_err());
    }
}
