//! Local-consistency oracle.
//!
//! A claim pair is rated by sending the fixed initialization prompt plus
//! `evalConsistency: [claim A] [claim B]` to a chat endpoint N times,
//! extracting the trailing 0-10 rating from each reply, and aggregating
//! the results into a histogram. Bimodal or high-variance histograms are
//! flagged for re-prompting or escalation to a stronger model. A
//! deterministic mock client keeps the whole pipeline testable offline.

mod client;

pub use client::{fixture_key, ChatClient, HttpChatClient, MockChatClient, TransportError};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::Rational;

/// The initialization prompt sent as the system message of every rating
/// request, embedded byte-for-byte from `init_prompt.txt`.
pub const INIT_PROMPT: &str = include_str!("init_prompt.txt");

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("claim {id:?} contains a square bracket: {text:?}")]
    BracketInClaim { id: String, text: String },
    #[error("claim {0:?} has empty text")]
    EmptyClaim(String),
    #[error("invalid oracle configuration: {0}")]
    BadConfig(String),
    #[error("bimodality needs at least {min} successful samples, have {got}")]
    InsufficientSamples { got: u32, min: u32 },
    #[error("transport failure after retries: {message}")]
    Transport {
        message: String,
        /// Whatever was collected before the failure.
        partial: Box<RatingDistribution>,
    },
}

/// One claim as shown to the oracle. Square brackets are reserved as claim
/// delimiters in the query, so the text may not contain them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimText {
    pub id: String,
    pub text: String,
}

impl ClaimText {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self, OracleError> {
        let id = id.into();
        let text = text.into();
        if text.is_empty() {
            return Err(OracleError::EmptyClaim(id));
        }
        if text.contains('[') || text.contains(']') {
            return Err(OracleError::BracketInClaim { id, text });
        }
        Ok(Self { id, text })
    }
}

/// One chat message on the wire.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

impl Message {
    pub fn system(content: impl Into<String>) -> Self {
        Self { role: "system".into(), content: content.into() }
    }

    pub fn user(content: impl Into<String>) -> Self {
        Self { role: "user".into(), content: content.into() }
    }
}

/// The two-message rating prompt for a claim pair.
pub fn build_prompt(a: &ClaimText, b: &ClaimText) -> Result<Vec<Message>, OracleError> {
    for claim in [a, b] {
        if claim.text.contains('[') || claim.text.contains(']') {
            return Err(OracleError::BracketInClaim {
                id: claim.id.clone(),
                text: claim.text.clone(),
            });
        }
    }
    Ok(vec![
        Message::system(INIT_PROMPT),
        Message::user(format!("evalConsistency: [{}] [{}]", a.text, b.text)),
    ])
}

/// Extract the trailing numerical rating from a reply: the last maximal
/// digit run, accepted iff it parses into 0..=10. Anything else is a
/// failure, which is data rather than an error.
pub fn extract_rating(reply: &str) -> Option<u8> {
    let bytes = reply.as_bytes();
    let mut end = bytes.len();
    while end > 0 {
        if bytes[end - 1].is_ascii_digit() {
            let mut start = end;
            while start > 0 && bytes[start - 1].is_ascii_digit() {
                start -= 1;
            }
            let value: u32 = reply[start..end].parse().ok()?;
            return if value <= 10 { Some(value as u8) } else { None };
        }
        end -= 1;
    }
    None
}

/// Oracle client configuration. `n_repeats` controls how many times the
/// same prompt is issued per pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub endpoint: String,
    pub model: String,
    /// Sampling temperature; `None` leaves the provider default in place.
    pub temperature: Option<f64>,
    pub n_repeats: u32,
    pub timeout_secs: u64,
    /// Extra attempts per call after a transport failure. Unparseable
    /// replies are never retried; they count as failed samples.
    pub max_retries: u32,
    /// Concurrent in-flight requests while rating one pair.
    pub max_in_flight: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1".into(),
            model: "gpt-4".into(),
            temperature: None,
            n_repeats: 100,
            timeout_secs: 60,
            max_retries: 1,
            max_in_flight: 4,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<(), OracleError> {
        if self.n_repeats == 0 {
            return Err(OracleError::BadConfig("n_repeats must be at least 1".into()));
        }
        if self.timeout_secs == 0 {
            return Err(OracleError::BadConfig("timeout must be positive".into()));
        }
        if self.max_in_flight == 0 {
            return Err(OracleError::BadConfig("max_in_flight must be at least 1".into()));
        }
        Ok(())
    }
}

/// One raw oracle reply with its extraction outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingSample {
    pub reply: String,
    /// `None` when no 0-10 rating could be extracted.
    pub rating: Option<u8>,
    pub latency_ms: u64,
}

impl RatingSample {
    pub fn from_reply(reply: impl Into<String>, latency_ms: u64) -> Self {
        let reply = reply.into();
        let rating = extract_rating(&reply);
        Self { reply, rating, latency_ms }
    }
}

/// Minimum successful samples before bimodality is meaningful.
pub const BIMODALITY_MIN_SAMPLES: u32 = 10;

/// Histogram and summary statistics of the ratings for one claim pair.
/// Order-insensitive by construction: permuting the samples cannot change
/// any field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingDistribution {
    /// counts[r] = number of successful samples rated r.
    pub counts: [u32; 11],
    pub n_success: u32,
    pub n_fail: u32,
    /// Mean rating on the 0-10 scale; absent when nothing succeeded.
    pub mean: Option<f64>,
    /// Population standard deviation on the 0-10 scale.
    pub std_dev: Option<f64>,
    /// Set when [`BIMODALITY_MIN_SAMPLES`] or more successes split into
    /// two well-separated modes; see [`detect_bimodality`].
    pub bimodal: bool,
}

impl RatingDistribution {
    pub fn from_counts(counts: [u32; 11], n_fail: u32) -> Self {
        let n_success: u32 = counts.iter().sum();
        let (mean, std_dev) = if n_success == 0 {
            (None, None)
        } else {
            let total: f64 = counts
                .iter()
                .enumerate()
                .map(|(r, &c)| r as f64 * f64::from(c))
                .sum();
            let mean = total / f64::from(n_success);
            let var: f64 = counts
                .iter()
                .enumerate()
                .map(|(r, &c)| f64::from(c) * (r as f64 - mean).powi(2))
                .sum::<f64>()
                / f64::from(n_success);
            (Some(mean), Some(var.sqrt()))
        };
        let mut dist = Self {
            counts,
            n_success,
            n_fail,
            mean,
            std_dev,
            bimodal: false,
        };
        if n_success >= BIMODALITY_MIN_SAMPLES {
            dist.bimodal = detect_bimodality(&dist).expect("sample floor just checked");
        }
        dist
    }

    pub fn from_samples<'a, I>(samples: I) -> Self
    where
        I: IntoIterator<Item = &'a RatingSample>,
    {
        let mut counts = [0u32; 11];
        let mut n_fail = 0;
        for sample in samples {
            match sample.rating {
                Some(r) => counts[usize::from(r)] += 1,
                None => n_fail += 1,
            }
        }
        Self::from_counts(counts, n_fail)
    }

    /// Exact mean as a rational, for downstream discrepancy arithmetic.
    pub fn mean_exact(&self) -> Option<Rational> {
        if self.n_success == 0 {
            return None;
        }
        let total: i64 = self
            .counts
            .iter()
            .enumerate()
            .map(|(r, &c)| r as i64 * i64::from(c))
            .sum();
        Some(Rational::new(total, i64::from(self.n_success)))
    }

    /// Discrepancy 1 - mean/10 as an exact rational.
    pub fn discrepancy(&self) -> Option<Rational> {
        self.mean_exact()
            .map(|m| Rational::new(1, 1) - m / Rational::new(10, 1))
    }

    pub fn n_total(&self) -> u32 {
        self.n_success + self.n_fail
    }
}

/// Two local maxima of the histogram, separated by at least four bins and
/// each holding at least 20% of the successful samples.
pub fn detect_bimodality(dist: &RatingDistribution) -> Result<bool, OracleError> {
    if dist.n_success < BIMODALITY_MIN_SAMPLES {
        return Err(OracleError::InsufficientSamples {
            got: dist.n_success,
            min: BIMODALITY_MIN_SAMPLES,
        });
    }
    let counts = &dist.counts;
    let at = |i: isize| -> u32 {
        if (0..11).contains(&i) {
            counts[i as usize]
        } else {
            0
        }
    };
    let mass_floor = f64::from(dist.n_success) * 0.2;
    let modes: Vec<usize> = (0..11)
        .filter(|&i| {
            counts[i] > 0
                && counts[i] >= at(i as isize - 1)
                && counts[i] >= at(i as isize + 1)
                && f64::from(counts[i]) >= mass_floor
        })
        .collect();
    Ok(modes
        .iter()
        .any(|&lo| modes.iter().any(|&hi| hi >= lo + 4)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriageDecision {
    Accept,
    Reprompt,
    Escalate,
}

/// Thresholds steering [`triage`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriagePolicy {
    /// Maximum acceptable standard deviation on the 0-10 scale.
    pub std_threshold: f64,
    /// Re-prompts before escalating to the stronger model.
    pub max_reprompts: u32,
    /// Model to hand off to on escalation.
    pub escalate_model: Option<String>,
}

impl Default for TriagePolicy {
    fn default() -> Self {
        Self {
            std_threshold: 2.0,
            max_reprompts: 2,
            escalate_model: None,
        }
    }
}

/// Accept a clean distribution, re-prompt a suspicious one, and escalate
/// once `reprompts_used` exhausts the policy budget.
pub fn triage(
    dist: &RatingDistribution,
    policy: &TriagePolicy,
    reprompts_used: u32,
) -> TriageDecision {
    let high_variance = dist
        .std_dev
        .map_or(true, |s| s > policy.std_threshold);
    let decision = if !dist.bimodal && !high_variance {
        TriageDecision::Accept
    } else if reprompts_used < policy.max_reprompts {
        TriageDecision::Reprompt
    } else {
        TriageDecision::Escalate
    };
    log::info!(
        "triage: bimodal={} std={:?} reprompts_used={} -> {:?}",
        dist.bimodal,
        dist.std_dev,
        reprompts_used,
        decision
    );
    decision
}

/// Issue the same rating prompt `cfg.n_repeats` times and aggregate the
/// replies. Calls run with at most `cfg.max_in_flight` in flight; the
/// histogram aggregation is order-insensitive, so scheduling cannot change
/// the result. A call that still fails transport after retries aborts the
/// run with whatever was already collected.
pub fn rate_pair(
    client: &dyn ChatClient,
    cfg: &OracleConfig,
    a: &ClaimText,
    b: &ClaimText,
) -> Result<RatingDistribution, OracleError> {
    cfg.validate()?;
    let messages = build_prompt(a, b)?;
    let n = cfg.n_repeats;

    use std::sync::atomic::{AtomicBool, AtomicU32, Ordering};
    use std::sync::Mutex;

    let next = AtomicU32::new(0);
    let stop = AtomicBool::new(false);
    let samples: Mutex<Vec<RatingSample>> = Mutex::new(Vec::with_capacity(n as usize));
    let transport_failure: Mutex<Option<String>> = Mutex::new(None);

    let worker = || {
        while !stop.load(Ordering::SeqCst) {
            let i = next.fetch_add(1, Ordering::SeqCst);
            if i >= n {
                break;
            }
            let mut attempt = 0;
            loop {
                let started = std::time::Instant::now();
                match client.complete(&messages) {
                    Ok(reply) => {
                        let sample = RatingSample::from_reply(
                            reply,
                            started.elapsed().as_millis() as u64,
                        );
                        samples.lock().expect("sample sink").push(sample);
                        break;
                    }
                    Err(err) if attempt < cfg.max_retries => {
                        log::warn!("transport failure, retrying: {err}");
                        attempt += 1;
                    }
                    Err(err) => {
                        // Exhausted retries: record the failed call and
                        // bring the whole run down.
                        samples.lock().expect("sample sink").push(RatingSample {
                            reply: String::new(),
                            rating: None,
                            latency_ms: started.elapsed().as_millis() as u64,
                        });
                        *transport_failure.lock().expect("failure slot") =
                            Some(err.to_string());
                        stop.store(true, Ordering::SeqCst);
                        break;
                    }
                }
            }
        }
    };

    let workers = cfg.max_in_flight.min(n).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(worker);
        }
    });

    let samples = samples.into_inner().expect("sample sink");
    let distribution = RatingDistribution::from_samples(samples.iter());
    if let Some(message) = transport_failure.into_inner().expect("failure slot") {
        return Err(OracleError::Transport {
            message,
            partial: Box::new(distribution),
        });
    }
    debug_assert_eq!(distribution.n_total(), n);
    Ok(distribution)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claim(id: &str, text: &str) -> ClaimText {
        ClaimText::new(id, text).unwrap()
    }

    #[test]
    fn prompt_layout() {
        let msgs = build_prompt(
            &claim("a", "The earth is flat"),
            &claim("b", "The sky is red"),
        )
        .unwrap();
        assert_eq!(msgs.len(), 2);
        assert_eq!(msgs[0].role, "system");
        assert_eq!(msgs[0].content, INIT_PROMPT);
        assert_eq!(msgs[1].role, "user");
        assert_eq!(
            msgs[1].content,
            "evalConsistency: [The earth is flat] [The sky is red]"
        );
    }

    #[test]
    fn self_pair_is_well_formed() {
        let msgs = build_prompt(&claim("a", "A"), &claim("a2", "A")).unwrap();
        assert_eq!(msgs[1].content, "evalConsistency: [A] [A]");
    }

    #[test]
    fn brackets_rejected() {
        assert!(matches!(
            ClaimText::new("bad", "claims [nested] here"),
            Err(OracleError::BracketInClaim { .. })
        ));
    }

    #[test]
    fn rating_extraction_cases() {
        assert_eq!(
            extract_rating("the consistency rating of these claims is 0."),
            Some(0)
        );
        assert_eq!(
            extract_rating("so the consistency rating of these claims is 10."),
            Some(10)
        );
        assert_eq!(
            extract_rating("As such, I would give a consistency rating of 5."),
            Some(5)
        );
        assert_eq!(extract_rating("I cannot provide a rating."), None);
        assert_eq!(extract_rating("I rate this 11."), None);
        assert_eq!(extract_rating("an 8 out of 10"), Some(10));
        assert_eq!(extract_rating(""), None);
    }

    #[test]
    fn distribution_statistics() {
        let mut counts = [0u32; 11];
        counts[10] = 100;
        let d = RatingDistribution::from_counts(counts, 0);
        assert_eq!(d.mean, Some(10.0));
        assert_eq!(d.std_dev, Some(0.0));
        assert!(!d.bimodal);
        assert_eq!(d.mean_exact(), Some(Rational::new(10, 1)));
        assert_eq!(d.discrepancy(), Some(Rational::new(0, 1)));
    }

    #[test]
    fn alternating_extremes_are_bimodal() {
        let mut counts = [0u32; 11];
        counts[0] = 50;
        counts[10] = 50;
        let d = RatingDistribution::from_counts(counts, 0);
        assert_eq!(d.mean, Some(5.0));
        assert!(d.bimodal);
    }

    #[test]
    fn narrow_second_mode_is_not_bimodal() {
        let mut counts = [0u32; 11];
        counts[10] = 80;
        counts[9] = 20;
        let d = RatingDistribution::from_counts(counts, 0);
        assert!(!d.bimodal);
    }

    #[test]
    fn low_mass_mode_is_not_bimodal() {
        let mut counts = [0u32; 11];
        counts[0] = 10;
        counts[10] = 90;
        let d = RatingDistribution::from_counts(counts, 0);
        assert!(!d.bimodal, "10% mass at 0 is below the 20% floor");
    }

    #[test]
    fn bimodality_needs_samples() {
        let mut counts = [0u32; 11];
        counts[0] = 2;
        counts[10] = 2;
        let d = RatingDistribution::from_counts(counts, 0);
        assert!(matches!(
            detect_bimodality(&d),
            Err(OracleError::InsufficientSamples { got: 4, min: 10 })
        ));
    }

    #[test]
    fn triage_transitions() {
        let policy = TriagePolicy::default();
        let mut clean = [0u32; 11];
        clean[10] = 100;
        let clean = RatingDistribution::from_counts(clean, 0);
        assert_eq!(triage(&clean, &policy, 0), TriageDecision::Accept);

        let mut split = [0u32; 11];
        split[0] = 50;
        split[10] = 50;
        let split = RatingDistribution::from_counts(split, 0);
        assert_eq!(triage(&split, &policy, 0), TriageDecision::Reprompt);
        assert_eq!(triage(&split, &policy, 1), TriageDecision::Reprompt);
        assert_eq!(triage(&split, &policy, 2), TriageDecision::Escalate);
    }

    #[test]
    fn rate_pair_counts_add_up() {
        let client = MockChatClient::scripted(vec![
            "the consistency rating of these claims is 10.".into(),
        ]);
        let cfg = OracleConfig {
            n_repeats: 100,
            ..OracleConfig::default()
        };
        let d = rate_pair(&client, &cfg, &claim("a", "A"), &claim("b", "B")).unwrap();
        assert_eq!(d.counts[10], 100);
        assert_eq!(d.n_success, 100);
        assert_eq!(d.n_fail, 0);
        assert_eq!(d.mean, Some(10.0));
        assert_eq!(d.std_dev, Some(0.0));
    }

    #[test]
    fn rate_pair_alternating_is_bimodal() {
        let client = MockChatClient::scripted(vec![
            "rating is 0.".into(),
            "rating is 10.".into(),
        ]);
        let cfg = OracleConfig {
            n_repeats: 100,
            max_in_flight: 1,
            ..OracleConfig::default()
        };
        let d = rate_pair(&client, &cfg, &claim("a", "A"), &claim("b", "B")).unwrap();
        assert_eq!(d.counts[0], 50);
        assert_eq!(d.counts[10], 50);
        assert_eq!(d.mean, Some(5.0));
        assert!(d.bimodal);
    }

    #[test]
    fn rate_pair_tolerates_one_malformed_reply() {
        let mut replies = vec!["rating is 10.".into(); 99];
        replies.insert(42, "no rating today".into());
        let client = MockChatClient::scripted(replies);
        let cfg = OracleConfig {
            n_repeats: 100,
            max_in_flight: 1,
            ..OracleConfig::default()
        };
        let d = rate_pair(&client, &cfg, &claim("a", "A"), &claim("b", "B")).unwrap();
        assert_eq!(d.n_fail, 1);
        assert_eq!(d.n_success, 99);
    }

    struct FlakyClient {
        failures_left: std::sync::Mutex<u32>,
    }

    impl ChatClient for FlakyClient {
        fn complete(&self, _messages: &[Message]) -> Result<String, TransportError> {
            let mut left = self.failures_left.lock().unwrap();
            if *left > 0 {
                *left -= 1;
                return Err(TransportError::new("connection reset"));
            }
            Ok("rating is 10.".into())
        }
    }

    #[test]
    fn transient_transport_failures_are_retried() {
        let client = FlakyClient { failures_left: std::sync::Mutex::new(3) };
        let cfg = OracleConfig {
            n_repeats: 5,
            max_in_flight: 1,
            max_retries: 1,
            ..OracleConfig::default()
        };
        // 3 failures spread over 5 calls with one retry each: every call
        // eventually succeeds.
        let d = rate_pair(&client, &cfg, &claim("a", "A"), &claim("b", "B")).unwrap();
        assert_eq!(d.n_success, 5);
    }

    struct DeadClient;

    impl ChatClient for DeadClient {
        fn complete(&self, _messages: &[Message]) -> Result<String, TransportError> {
            Err(TransportError::new("connection refused"))
        }
    }

    #[test]
    fn persistent_transport_failure_carries_partial_results() {
        let cfg = OracleConfig {
            n_repeats: 10,
            max_in_flight: 1,
            ..OracleConfig::default()
        };
        let err = rate_pair(&DeadClient, &cfg, &claim("a", "A"), &claim("b", "B")).unwrap_err();
        match err {
            OracleError::Transport { partial, .. } => {
                assert_eq!(partial.n_success, 0);
                assert!(partial.n_fail >= 1);
            }
            other => panic!("expected transport error, got {other:?}"),
        }
    }

    #[test]
    fn distribution_is_permutation_invariant() {
        let replies = ["is 3.", "is 7.", "is 3.", "nope", "is 10."];
        let forward: Vec<RatingSample> = replies
            .iter()
            .map(|r| RatingSample::from_reply(*r, 0))
            .collect();
        let mut reversed = forward.clone();
        reversed.reverse();
        assert_eq!(
            RatingDistribution::from_samples(forward.iter()),
            RatingDistribution::from_samples(reversed.iter())
        );
    }
}
