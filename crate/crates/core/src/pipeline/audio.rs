//! Mono PCM16 clips and a small RIFF/WAVE codec.
//!
//! Decoding accepts PCM 8/16/24/32-bit integer and 32-bit float data, any
//! channel count, and optional `LIST`/`INFO` metadata whose `ICMT` entry is
//! kept as the clip comment. Encoding always writes PCM16 mono.

use thiserror::Error;

pub const CANONICAL_SAMPLE_RATE: u32 = 16_000;

const FORMAT_PCM: u16 = 1;
const FORMAT_FLOAT: u16 = 3;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AudioError {
    #[error("not a RIFF/WAVE file")]
    NotWave,
    #[error("truncated {0} chunk")]
    Truncated(&'static str),
    #[error("missing {0} chunk")]
    MissingChunk(&'static str),
    #[error("unsupported sample format (format tag {format}, {bits} bits)")]
    UnsupportedFormat { format: u16, bits: u16 },
    #[error("invalid fmt chunk: {0}")]
    InvalidFormat(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioClip {
    pub samples: Vec<i16>,
    pub sample_rate: u32,
    /// `ICMT` text from the WAV `INFO` list, if any.
    pub comment: Option<String>,
}

impl AudioClip {
    pub fn new(samples: Vec<i16>, sample_rate: u32) -> Self {
        AudioClip { samples, sample_rate, comment: None }
    }

    pub fn silent(sample_rate: u32) -> Self {
        AudioClip::new(Vec::new(), sample_rate)
    }

    pub fn with_comment(mut self, comment: impl Into<String>) -> Self {
        self.comment = Some(comment.into());
        self
    }

    pub fn duration_ms(&self) -> u64 {
        if self.sample_rate == 0 {
            return 0;
        }
        let n = self.samples.len() as u64;
        let sr = self.sample_rate as u64;
        (1000 * n + sr / 2) / sr
    }

    /// Samples as little-endian bytes; the mock ASR digests these.
    pub fn pcm_bytes(&self) -> Vec<u8> {
        self.samples.iter().flat_map(|s| s.to_le_bytes()).collect()
    }

    /// Linear-interpolation resample to `rate`. The comment is kept.
    pub fn resample(&self, rate: u32) -> AudioClip {
        if rate == self.sample_rate || self.samples.is_empty() {
            return AudioClip { samples: self.samples.clone(), sample_rate: rate, comment: self.comment.clone() };
        }
        let ratio = self.sample_rate as f64 / rate as f64;
        let out_len = (self.samples.len() as f64 / ratio).round().max(1.0) as usize;
        let last = self.samples.len() - 1;
        let samples = (0..out_len)
            .map(|i| {
                let pos = i as f64 * ratio;
                let lo = (pos.floor() as usize).min(last);
                let hi = (lo + 1).min(last);
                let frac = pos - lo as f64;
                let v = self.samples[lo] as f64 * (1.0 - frac) + self.samples[hi] as f64 * frac;
                v.round() as i16
            })
            .collect();
        AudioClip { samples, sample_rate: rate, comment: self.comment.clone() }
    }
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

struct Format {
    tag: u16,
    channels: u16,
    sample_rate: u32,
    bits: u16,
}

fn parse_fmt(body: &[u8]) -> Result<Format, AudioError> {
    if body.len() < 16 {
        return Err(AudioError::Truncated("fmt"));
    }
    let mut tag = u16_at(body, 0);
    let channels = u16_at(body, 2);
    let sample_rate = u32_at(body, 4);
    let bits = u16_at(body, 14);
    if tag == FORMAT_EXTENSIBLE {
        if body.len() < 26 {
            return Err(AudioError::Truncated("fmt"));
        }
        // the sub-format GUID starts with the plain format tag
        tag = u16_at(body, 24);
    }
    if channels == 0 {
        return Err(AudioError::InvalidFormat("zero channels"));
    }
    if sample_rate == 0 {
        return Err(AudioError::InvalidFormat("zero sample rate"));
    }
    Ok(Format { tag, channels, sample_rate, bits })
}

fn parse_info(body: &[u8]) -> Option<String> {
    if body.len() < 4 || &body[..4] != b"INFO" {
        return None;
    }
    let mut at = 4;
    while at + 8 <= body.len() {
        let id = &body[at..at + 4];
        let len = u32_at(body, at + 4) as usize;
        let start = at + 8;
        let end = start.checked_add(len)?.min(body.len());
        if id == b"ICMT" {
            let raw = &body[start..end];
            let text = raw.split(|&b| b == 0).next().unwrap_or(raw);
            return Some(String::from_utf8_lossy(text).into_owned());
        }
        at = end + (len & 1);
    }
    None
}

fn decode_frames(data: &[u8], fmt: &Format) -> Result<Vec<Vec<f64>>, AudioError> {
    let unsupported = AudioError::UnsupportedFormat { format: fmt.tag, bits: fmt.bits };
    let width = match (fmt.tag, fmt.bits) {
        (FORMAT_PCM, 8 | 16 | 24 | 32) | (FORMAT_FLOAT, 32) => fmt.bits as usize / 8,
        _ => return Err(unsupported),
    };
    let channels = fmt.channels as usize;
    let frame = width * channels;
    let frames = data
        .chunks_exact(frame)
        .map(|f| {
            f.chunks_exact(width)
                .map(|s| match (fmt.tag, width) {
                    (FORMAT_PCM, 1) => (s[0] as f64 - 128.0) / 128.0,
                    (FORMAT_PCM, 2) => i16::from_le_bytes([s[0], s[1]]) as f64 / 32768.0,
                    (FORMAT_PCM, 3) => {
                        let v = i32::from_le_bytes([0, s[0], s[1], s[2]]) >> 8;
                        v as f64 / 8_388_608.0
                    }
                    (FORMAT_PCM, _) => i32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64 / 2_147_483_648.0,
                    _ => f32::from_le_bytes([s[0], s[1], s[2], s[3]]) as f64,
                })
                .collect()
        })
        .collect();
    Ok(frames)
}

fn to_i16(v: f64) -> i16 {
    (v * 32768.0).round().clamp(-32768.0, 32767.0) as i16
}

/// Parses a WAV file into a mono clip at the file's own sample rate.
/// Multi-channel audio is averaged down to one channel.
pub fn decode_wav(bytes: &[u8]) -> Result<AudioClip, AudioError> {
    if bytes.len() < 12 || &bytes[..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
        return Err(AudioError::NotWave);
    }
    let mut fmt = None;
    let mut data = None;
    let mut comment = None;
    let mut at = 12;
    while at + 8 <= bytes.len() {
        let id = &bytes[at..at + 4];
        let len = u32_at(bytes, at + 4) as usize;
        let start = at + 8;
        let end = start.saturating_add(len);
        let body = if end <= bytes.len() {
            &bytes[start..end]
        } else if id == b"data" {
            // streaming writers leave the data length unset; take what is there
            &bytes[start..]
        } else if id == b"fmt " {
            return Err(AudioError::Truncated("fmt"));
        } else {
            break;
        };
        match id {
            b"fmt " => fmt = Some(parse_fmt(body)?),
            b"data" => data = Some(body),
            b"LIST" => comment = comment.or_else(|| parse_info(body)),
            _ => {}
        }
        at = end.saturating_add(len & 1);
    }
    let fmt = fmt.ok_or(AudioError::MissingChunk("fmt"))?;
    let data = data.ok_or(AudioError::MissingChunk("data"))?;

    let samples = if fmt.tag == FORMAT_PCM && fmt.bits == 16 && fmt.channels == 1 {
        data.chunks_exact(2).map(|s| i16::from_le_bytes([s[0], s[1]])).collect()
    } else {
        decode_frames(data, &fmt)?
            .iter()
            .map(|f| to_i16(f.iter().sum::<f64>() / f.len() as f64))
            .collect()
    };
    Ok(AudioClip { samples, sample_rate: fmt.sample_rate, comment })
}

/// Decodes and converts to 16 kHz mono.
pub fn decode_canonical(bytes: &[u8]) -> Result<AudioClip, AudioError> {
    Ok(decode_wav(bytes)?.resample(CANONICAL_SAMPLE_RATE))
}

/// Writes PCM16 mono, with the comment as an `INFO`/`ICMT` entry.
pub fn encode_wav(clip: &AudioClip) -> Vec<u8> {
    let data_len = clip.samples.len() * 2;
    let list = clip.comment.as_ref().map(|c| {
        let mut text = c.as_bytes().to_vec();
        text.push(0);
        let text_len = text.len();
        if text_len % 2 == 1 {
            text.push(0);
        }
        let mut list = b"INFO".to_vec();
        list.extend_from_slice(b"ICMT");
        list.extend_from_slice(&(text_len as u32).to_le_bytes());
        list.extend_from_slice(&text);
        list
    });
    let list_len = list.as_ref().map_or(0, |l| 8 + l.len());
    let riff_len = 4 + (8 + 16) + list_len + 8 + data_len + (data_len & 1);

    let mut out = Vec::with_capacity(8 + riff_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(riff_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&FORMAT_PCM.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&(clip.sample_rate * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    if let Some(list) = list {
        out.extend_from_slice(b"LIST");
        out.extend_from_slice(&(list.len() as u32).to_le_bytes());
        out.extend_from_slice(&list);
    }
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    out.extend_from_slice(&clip.pcm_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(tag: u16, channels: u16, rate: u32, bits: u16, data: &[u8]) -> Vec<u8> {
        let block = channels * bits / 8;
        let mut out = b"RIFF".to_vec();
        out.extend_from_slice(&((4 + 24 + 8 + data.len()) as u32).to_le_bytes());
        out.extend_from_slice(b"WAVEfmt ");
        out.extend_from_slice(&16u32.to_le_bytes());
        out.extend_from_slice(&tag.to_le_bytes());
        out.extend_from_slice(&channels.to_le_bytes());
        out.extend_from_slice(&rate.to_le_bytes());
        out.extend_from_slice(&(rate * block as u32).to_le_bytes());
        out.extend_from_slice(&block.to_le_bytes());
        out.extend_from_slice(&bits.to_le_bytes());
        out.extend_from_slice(b"data");
        out.extend_from_slice(&(data.len() as u32).to_le_bytes());
        out.extend_from_slice(data);
        out
    }

    #[test]
    fn round_trip_with_comment() {
        let clip = AudioClip::new(vec![0, 1, -1, i16::MAX, i16::MIN], 16_000).with_comment("मैं जाना चाहता हूँ");
        let bytes = encode_wav(&clip);
        assert_eq!(u32_at(&bytes, 4) as usize, bytes.len() - 8);
        assert_eq!(decode_wav(&bytes).unwrap(), clip);
        let plain = AudioClip::new(vec![5; 3], 8_000);
        assert_eq!(decode_wav(&encode_wav(&plain)).unwrap(), plain);
    }

    #[test]
    fn duration_rounds_to_nearest_ms() {
        assert_eq!(AudioClip::new(vec![0; 8800], 16_000).duration_ms(), 550);
        assert_eq!(AudioClip::new(vec![0; 8], 16_000).duration_ms(), 1);
        assert_eq!(AudioClip::new(vec![0; 7], 16_000).duration_ms(), 0);
        assert_eq!(AudioClip::silent(16_000).duration_ms(), 0);
    }

    #[test]
    fn stereo_is_averaged() {
        let data: Vec<u8> = [1000i16, 3000, -2000, 0].iter().flat_map(|s| s.to_le_bytes()).collect();
        let clip = decode_wav(&header(FORMAT_PCM, 2, 16_000, 16, &data)).unwrap();
        assert_eq!(clip.samples, [2000, -1000]);
    }

    #[test]
    fn float_and_8_bit_samples() {
        let data: Vec<u8> = [0.5f32, -1.0].iter().flat_map(|s| s.to_le_bytes()).collect();
        let clip = decode_wav(&header(FORMAT_FLOAT, 1, 16_000, 32, &data)).unwrap();
        assert_eq!(clip.samples, [16384, -32768]);
        let clip = decode_wav(&header(FORMAT_PCM, 1, 8_000, 8, &[128, 192, 0])).unwrap();
        assert_eq!(clip.samples, [0, 16384, -32768]);
        let data = [0x00, 0x00, 0x40];
        let clip = decode_wav(&header(FORMAT_PCM, 1, 8_000, 24, &data)).unwrap();
        assert_eq!(clip.samples, [16384]);
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(decode_wav(b"hello world, not audio"), Err(AudioError::NotWave));
        assert_eq!(decode_wav(b""), Err(AudioError::NotWave));
        let mut no_data = header(FORMAT_PCM, 1, 16_000, 16, &[]);
        no_data.truncate(36);
        assert_eq!(decode_wav(&no_data), Err(AudioError::MissingChunk("data")));
        assert!(matches!(
            decode_wav(&header(7, 1, 8_000, 8, &[0])),
            Err(AudioError::UnsupportedFormat { format: 7, .. })
        ));
        assert!(matches!(decode_wav(&header(FORMAT_PCM, 0, 8_000, 16, &[])), Err(AudioError::InvalidFormat(_))));
    }

    #[test]
    fn resample_halves_and_doubles() {
        let clip = AudioClip::new(vec![0, 100, 200, 300], 32_000);
        let down = clip.resample(16_000);
        assert_eq!(down.samples, [0, 200]);
        assert_eq!(down.sample_rate, 16_000);
        let up = AudioClip::new(vec![0, 100], 8_000).resample(16_000);
        assert_eq!(up.samples, [0, 50, 100, 100]);
        let same = AudioClip::new(vec![1, 2, 3], 16_000);
        assert_eq!(same.resample(16_000), same);
    }
}
