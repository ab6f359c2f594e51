//! RIFF/WAVE decoding and encoding for integer PCM and IEEE float data.
//!
//! All header fields are little-endian. Unknown chunks are skipped, and the
//! `fmt ` and `data` chunks may appear in either order.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::signal::Signal;

const FORMAT_PCM: u16 = 0x0001;
const FORMAT_FLOAT: u16 = 0x0003;
const FORMAT_EXTENSIBLE: u16 = 0xFFFE;

/// Sample encoding found in (or written to) a WAV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleFormat {
    Pcm8,
    Pcm16,
    Pcm24,
    Pcm32,
    Float32,
    Float64,
}

impl SampleFormat {
    fn from_header(tag: u16, bits: u16) -> Result<Self> {
        match (tag, bits) {
            (FORMAT_PCM, 8) => Ok(SampleFormat::Pcm8),
            (FORMAT_PCM, 16) => Ok(SampleFormat::Pcm16),
            (FORMAT_PCM, 24) => Ok(SampleFormat::Pcm24),
            (FORMAT_PCM, 32) => Ok(SampleFormat::Pcm32),
            (FORMAT_FLOAT, 32) => Ok(SampleFormat::Float32),
            (FORMAT_FLOAT, 64) => Ok(SampleFormat::Float64),
            (FORMAT_PCM | FORMAT_FLOAT, b) => Err(Error::UnsupportedBitDepth(b)),
            (t, _) => Err(Error::UnsupportedCodec(t)),
        }
    }

    pub fn bits(self) -> u16 {
        match self {
            SampleFormat::Pcm8 => 8,
            SampleFormat::Pcm16 => 16,
            SampleFormat::Pcm24 => 24,
            SampleFormat::Pcm32 | SampleFormat::Float32 => 32,
            SampleFormat::Float64 => 64,
        }
    }

    fn tag(self) -> u16 {
        match self {
            SampleFormat::Float32 | SampleFormat::Float64 => FORMAT_FLOAT,
            _ => FORMAT_PCM,
        }
    }

    fn bytes(self) -> usize {
        self.bits() as usize / 8
    }

    fn decode(self, b: &[u8]) -> f64 {
        match self {
            SampleFormat::Pcm8 => (b[0] as f64 - 128.0) / 128.0,
            SampleFormat::Pcm16 => i16::from_le_bytes([b[0], b[1]]) as f64 / 32768.0,
            SampleFormat::Pcm24 => {
                // sign-extend through the top byte of an i32
                let v = i32::from_le_bytes([0, b[0], b[1], b[2]]) >> 8;
                v as f64 / 8_388_608.0
            }
            SampleFormat::Pcm32 => i32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64 / 2_147_483_648.0,
            SampleFormat::Float32 => f32::from_le_bytes([b[0], b[1], b[2], b[3]]) as f64,
            SampleFormat::Float64 => f64::from_le_bytes(b[..8].try_into().unwrap()),
        }
    }

    fn encode(self, x: f64, out: &mut Vec<u8>) {
        let int = |full_scale: f64, min: f64, max: f64| (x * full_scale).round().clamp(min, max);
        match self {
            SampleFormat::Pcm8 => out.push((int(128.0, -128.0, 127.0) + 128.0) as u8),
            SampleFormat::Pcm16 => out.extend_from_slice(&(int(32768.0, -32768.0, 32767.0) as i16).to_le_bytes()),
            SampleFormat::Pcm24 => {
                let v = int(8_388_608.0, -8_388_608.0, 8_388_607.0) as i32;
                out.extend_from_slice(&v.to_le_bytes()[..3]);
            }
            SampleFormat::Pcm32 => {
                let v = int(2_147_483_648.0, -2_147_483_648.0, 2_147_483_647.0) as i32;
                out.extend_from_slice(&v.to_le_bytes());
            }
            SampleFormat::Float32 => out.extend_from_slice(&(x as f32).to_le_bytes()),
            SampleFormat::Float64 => out.extend_from_slice(&x.to_le_bytes()),
        }
    }

    fn is_float(self) -> bool {
        matches!(self, SampleFormat::Float32 | SampleFormat::Float64)
    }
}

/// Decoded audio: one [`Signal`] per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioFile {
    pub channels: Vec<Signal>,
    pub sample_rate_hz: f64,
    pub source_format: SampleFormat,
}

/// How to reduce several channels to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonoMode {
    #[default]
    Mean,
    Channel(usize),
}

impl AudioFile {
    pub fn new(channels: Vec<Signal>, source_format: SampleFormat) -> Result<Self> {
        let first = channels.first().ok_or(Error::EmptyInput)?;
        let (len, rate) = (first.len(), first.sample_rate());
        for c in &channels {
            if c.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    actual: c.len(),
                });
            }
            if c.sample_rate() != rate {
                return Err(Error::InconsistentSampleRate {
                    expected: rate,
                    actual: c.sample_rate(),
                });
            }
        }
        Ok(AudioFile {
            channels,
            sample_rate_hz: rate,
            source_format,
        })
    }

    pub fn frames(&self) -> usize {
        self.channels[0].len()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[0..4] != b"RIFF" || &bytes[8..12] != b"WAVE" {
            return Err(Error::NotWav);
        }
        let mut fmt: Option<(SampleFormat, usize, u32, usize)> = None;
        let mut data: Option<&[u8]> = None;
        let mut pos = 12;
        while pos + 8 <= bytes.len() {
            let id = &bytes[pos..pos + 4];
            let size = u32::from_le_bytes(bytes[pos + 4..pos + 8].try_into().unwrap()) as usize;
            let body_start = pos + 8;
            let body_end = body_start.checked_add(size).ok_or(Error::TruncatedFile)?;
            if body_end > bytes.len() {
                return Err(Error::TruncatedFile);
            }
            let body = &bytes[body_start..body_end];
            match id {
                b"fmt " => fmt = Some(parse_fmt(body)?),
                b"data" => data = Some(body),
                _ => {}
            }
            // chunks are word-aligned
            pos = body_end + (size & 1);
        }
        let (format, channels, rate, block_align) =
            fmt.ok_or_else(|| Error::MalformedWav("missing fmt chunk".into()))?;
        let data = data.ok_or_else(|| Error::MalformedWav("missing data chunk".into()))?;
        if data.len() % block_align != 0 {
            return Err(Error::TruncatedFile);
        }
        let frames = data.len() / block_align;
        let width = format.bytes();
        let mut out = vec![Vec::with_capacity(frames); channels];
        for frame in data.chunks_exact(block_align) {
            for (c, dest) in out.iter_mut().enumerate() {
                let v = format.decode(&frame[c * width..(c + 1) * width]);
                if !v.is_finite() {
                    return Err(Error::MalformedWav("non-finite float sample".into()));
                }
                dest.push(v);
            }
        }
        let channels = out
            .into_iter()
            .map(|s| Signal::new(s, rate as f64))
            .collect::<Result<Vec<_>>>()?;
        AudioFile::new(channels, format)
    }

    /// Encodes as a canonical 44-byte-header WAV. Returns the bytes and the
    /// number of samples clipped to `[-1, 1]` (integer formats only).
    pub fn to_bytes(&self, format: SampleFormat) -> Result<(Vec<u8>, usize)> {
        encode(&self.channels, self.sample_rate_hz, format)
    }
}

fn parse_fmt(body: &[u8]) -> Result<(SampleFormat, usize, u32, usize)> {
    if body.len() < 16 {
        return Err(Error::MalformedWav("fmt chunk too short".into()));
    }
    let u16_at = |i: usize| u16::from_le_bytes([body[i], body[i + 1]]);
    let mut tag = u16_at(0);
    let channels = u16_at(2) as usize;
    let rate = u32::from_le_bytes(body[4..8].try_into().unwrap());
    let block_align = u16_at(12) as usize;
    let bits = u16_at(14);
    if tag == FORMAT_EXTENSIBLE {
        if body.len() < 26 {
            return Err(Error::MalformedWav("extensible fmt chunk too short".into()));
        }
        // first two bytes of the sub-format GUID carry the real format tag
        tag = u16_at(24);
    }
    let format = SampleFormat::from_header(tag, bits)?;
    if channels == 0 || rate == 0 {
        return Err(Error::MalformedWav(format!("{channels} channels at {rate} Hz")));
    }
    if block_align != channels * format.bytes() {
        return Err(Error::MalformedWav(format!("block align {block_align}")));
    }
    Ok((format, channels, rate, block_align))
}

fn encode(channels: &[Signal], sample_rate_hz: f64, format: SampleFormat) -> Result<(Vec<u8>, usize)> {
    let n_channels = channels.len();
    let frames = channels.first().map_or(0, Signal::len);
    let block_align = n_channels * format.bytes();
    let data_len = frames * block_align;
    let rate = sample_rate_hz.round() as u32;
    let header_size: u32 = 36;
    let data_len32 = u32::try_from(data_len)
        .ok()
        .filter(|d| d.checked_add(header_size).is_some())
        .ok_or_else(|| Error::MalformedWav("data too large for RIFF".into()))?;

    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(header_size + data_len32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&format.tag().to_le_bytes());
    out.extend_from_slice(&(n_channels as u16).to_le_bytes());
    out.extend_from_slice(&rate.to_le_bytes());
    out.extend_from_slice(&(rate * block_align as u32).to_le_bytes());
    out.extend_from_slice(&(block_align as u16).to_le_bytes());
    out.extend_from_slice(&format.bits().to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len32.to_le_bytes());

    let mut clipped = 0;
    for i in 0..frames {
        for c in channels {
            let x = c.samples()[i];
            if !x.is_finite() {
                return Err(Error::NonFiniteSample(i));
            }
            if !format.is_float() && x.abs() > 1.0 {
                clipped += 1;
            }
            format.encode(x, &mut out);
        }
    }
    Ok((out, clipped))
}

/// Reads a WAV file from disk.
pub fn read_wav(path: impl AsRef<Path>) -> Result<AudioFile> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    AudioFile::from_bytes(&bytes)
}

/// Writes a mono WAV. Returns how many samples were clipped to `[-1, 1]`.
pub fn write_wav(path: impl AsRef<Path>, s: &Signal, format: SampleFormat) -> Result<usize> {
    let path = path.as_ref();
    let (bytes, clipped) = encode(std::slice::from_ref(s), s.sample_rate(), format)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    Ok(clipped)
}

/// Mean downmix or single-channel selection.
pub fn to_mono(audio: &AudioFile, mode: MonoMode) -> Result<Signal> {
    match mode {
        MonoMode::Channel(k) => audio.channels.get(k).cloned().ok_or(Error::ChannelOutOfRange {
            index: k,
            channels: audio.channels.len(),
        }),
        MonoMode::Mean if audio.channels.len() == 1 => Ok(audio.channels[0].clone()),
        MonoMode::Mean => {
            let k = audio.channels.len() as f64;
            let mixed = (0..audio.frames())
                .map(|i| audio.channels.iter().map(|c| c.samples()[i]).sum::<f64>() / k)
                .collect();
            Ok(Signal::from_parts(mixed, audio.sample_rate_hz))
        }
    }
}
