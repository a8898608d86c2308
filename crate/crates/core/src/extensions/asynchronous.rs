//! Asynchronous requests served segment by segment.
//!
//! Files are cut into `J` equal segments and every segment is placed as an
//! independent file. Time advances in rounds of one slot each; in every
//! round each active user receives its next segment through one coded
//! delivery among the active users. A request arriving at time `t` joins
//! at the first round boundary `ceil(t)` and leaves once its last segment
//! has been delivered.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::decode::{Decoder, LocalCache};
use crate::delivery::{coded_for_receivers, DEFAULT_MAX_CODED_USERS};
use crate::error::{Error, Result};
use crate::model::{BitSignature, CacheContents, FileStore, SystemParams, Transcript};
use crate::placement::decentralized_place;

/// A request by `user` for `file` (both zero-based) at time `time` slots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arrival {
    pub user: usize,
    pub time: f64,
    pub file: usize,
}

/// Parses `user,arrival_slot,file_id` lines (one-based ids).
///
/// Blank lines, `#` comments and a non-numeric header line are skipped.
/// Arrival slots may be fractional: `0.5` arrives halfway through slot 0.
pub fn parse_arrivals_csv(text: &str, num_users: usize, num_files: usize) -> Result<Vec<Arrival>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |msg: &str| Error::Schedule(format!("line {}: {msg}: {line:?}", lineno + 1));
        if fields.len() != 3 {
            return Err(bad("expected user,arrival_slot,file_id"));
        }
        let Ok(user) = fields[0].parse::<usize>() else {
            if out.is_empty() && fields[0].parse::<f64>().is_err() {
                continue;
            }
            return Err(bad("bad user id"));
        };
        let time: f64 = fields[1].parse().map_err(|_| bad("bad arrival slot"))?;
        let file: usize = fields[2].parse().map_err(|_| bad("bad file id"))?;
        if user == 0 || user > num_users {
            return Err(bad("user out of range"));
        }
        if file == 0 || file > num_files {
            return Err(bad("file out of range"));
        }
        out.push(Arrival {
            user: user - 1,
            time,
            file: file - 1,
        });
    }
    Ok(out)
}

/// One user's share of a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundEntry {
    pub user: usize,
    pub file: usize,
    /// Zero-based segment index.
    pub segment: usize,
}

/// Delivery during one slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Round {
    pub slot: usize,
    /// Active users in increasing user order; entry `r` is receiver `r`.
    pub entries: Vec<RoundEntry>,
    pub transcript: Transcript,
}

/// Full record of an asynchronous delivery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsyncSchedule {
    pub segments: usize,
    pub arrivals: Vec<Arrival>,
    pub rounds: Vec<Round>,
    /// Per arrival: slot of its first segment minus its arrival time.
    pub delays: Vec<f64>,
}

impl AsyncSchedule {
    pub fn payload_bits(&self) -> u64 {
        self.rounds.iter().map(|r| r.transcript.payload_bits()).sum()
    }

    /// Total payload normalized by the full file size.
    pub fn rate(&self, file_bits: usize) -> f64 {
        self.payload_bits() as f64 / file_bits as f64
    }

    pub fn max_delay(&self) -> f64 {
        self.delays.iter().copied().fold(0.0, f64::max)
    }
}

/// Parameters of the segment-level system: `N·J` files of `F/J` bits and
/// memory `M·J`, so each segment gets `floor(MF/(NJ))` cached bits.
pub fn segment_params(params: &SystemParams, segments: usize) -> Result<SystemParams> {
    params.validate()?;
    if segments == 0 || !params.file_bits.is_multiple_of(segments) {
        return Err(Error::Schedule(format!(
            "J={segments} must divide F={}",
            params.file_bits
        )));
    }
    SystemParams::new(
        params.num_files * segments,
        params.num_users,
        params.memory * segments as f64,
        params.file_bits / segments,
        params.seed,
    )
}

/// Placement treating every segment as its own file.
pub fn segment_placement(params: &SystemParams, segments: usize) -> Result<CacheContents> {
    decentralized_place(&segment_params(params, segments)?)
}

/// Runs the round scheduler. `caches` must come from [`segment_placement`]
/// and `files` is the unsegmented library.
pub fn schedule_async(
    params: &SystemParams,
    segments: usize,
    arrivals: &[Arrival],
    caches: &CacheContents,
    files: &FileStore,
) -> Result<AsyncSchedule> {
    let seg_params = segment_params(params, segments)?;
    if caches.num_files() != seg_params.num_files || caches.file_bits() != seg_params.file_bits {
        return Err(Error::Schedule("caches do not match the segment layout".into()));
    }
    for pair in arrivals.windows(2) {
        if pair[1].time < pair[0].time {
            return Err(Error::Schedule("arrival times must be nondecreasing".into()));
        }
    }
    for (i, a) in arrivals.iter().enumerate() {
        if !a.time.is_finite() || a.time < 0.0 {
            return Err(Error::Schedule(format!("bad arrival time {}", a.time)));
        }
        if a.user >= params.num_users || a.file >= params.num_files {
            return Err(Error::Schedule(format!("arrival {} out of range", i + 1)));
        }
        if arrivals[..i].iter().any(|b| b.user == a.user) {
            return Err(Error::Schedule(format!(
                "user {} has more than one request",
                a.user + 1
            )));
        }
    }
    let pieces = files.segmented(segments);

    let join: Vec<usize> = arrivals.iter().map(|a| a.time.ceil() as usize).collect();
    let mut next_segment = vec![0usize; arrivals.len()];
    let mut first_round = vec![None; arrivals.len()];
    let mut rounds = Vec::new();
    let mut slot = 0;
    while next_segment.iter().any(|&s| s < segments) {
        let mut active: Vec<usize> = (0..arrivals.len())
            .filter(|&i| join[i] <= slot && next_segment[i] < segments)
            .collect();
        if active.is_empty() {
            // idle until the next request joins
            slot = (0..arrivals.len())
                .filter(|&i| next_segment[i] < segments)
                .map(|i| join[i])
                .min()
                .expect("pending request");
            continue;
        }
        active.sort_by_key(|&i| arrivals[i].user);

        let entries: Vec<RoundEntry> = active
            .iter()
            .map(|&i| RoundEntry {
                user: arrivals[i].user,
                file: arrivals[i].file,
                segment: next_segment[i],
            })
            .collect();
        let receivers: Vec<usize> = entries.iter().map(|e| e.user).collect();
        let wants: Vec<Vec<usize>> = entries
            .iter()
            .map(|e| vec![e.file * segments + e.segment])
            .collect();
        let seg_files: Vec<usize> = wants.iter().flatten().copied().collect();
        let signatures = BitSignature::build(caches, &receivers, &seg_files)?;
        let transcript =
            coded_for_receivers(&signatures, &pieces, &wants, DEFAULT_MAX_CODED_USERS)?;

        for &i in &active {
            first_round[i].get_or_insert(slot);
            next_segment[i] += 1;
        }
        rounds.push(Round {
            slot,
            entries,
            transcript,
        });
        slot += 1;
    }

    let delays = arrivals
        .iter()
        .zip(&first_round)
        .map(|(a, r)| r.expect("every request is served") as f64 - a.time)
        .collect();
    Ok(AsyncSchedule {
        segments,
        arrivals: arrivals.to_vec(),
        rounds,
        delays,
    })
}

/// Per-request reassembly results.
#[derive(Debug, Clone, PartialEq)]
pub struct AsyncVerify {
    /// `true` at index `i` iff arrival `i` rebuilt its whole file.
    pub requests: Vec<bool>,
}

impl AsyncVerify {
    pub fn all_decoded(&self) -> bool {
        self.requests.iter().all(|&ok| ok)
    }
}

/// Decodes every round and checks that each requester reassembles its file.
pub fn verify_async_decode(
    schedule: &AsyncSchedule,
    caches: &CacheContents,
    files: &FileStore,
) -> Result<AsyncVerify> {
    let j = schedule.segments;
    let pieces = files.segmented(j);
    let mut got: Vec<Vec<Option<BitString>>> = vec![vec![None; j]; schedule.arrivals.len()];
    for round in &schedule.rounds {
        let receivers: Vec<usize> = round.entries.iter().map(|e| e.user).collect();
        let wants: Vec<Vec<usize>> = round
            .entries
            .iter()
            .map(|e| vec![e.file * j + e.segment])
            .collect();
        let decoder = Decoder::new(caches, &receivers, wants)?;
        for (r, entry) in round.entries.iter().enumerate() {
            let local = LocalCache::new(entry.user, caches, &pieces);
            if let Ok(mut out) = decoder.decode(r, &local, &round.transcript) {
                let request = schedule
                    .arrivals
                    .iter()
                    .position(|a| a.user == entry.user)
                    .expect("round entry belongs to a request");
                got[request][entry.segment] = Some(out.remove(0));
            }
        }
    }
    let requests = schedule
        .arrivals
        .iter()
        .zip(got)
        .map(|(a, segs)| {
            let mut whole = BitString::zeros(0);
            for seg in segs {
                match seg {
                    Some(bits) => whole.extend_from(&bits),
                    None => return false,
                }
            }
            &whole == files.file(a.file)
        })
        .collect();
    Ok(AsyncVerify { requests })
}
