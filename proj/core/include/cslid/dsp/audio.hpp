// core/include/cslid/dsp/audio.hpp

// Copyright 2026  CSLID Contributors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef CSLID_DSP_AUDIO_HPP_
#define CSLID_DSP_AUDIO_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace cslid {

// Mono audio held as float samples in [-1, 1].
struct AudioBuffer {
  std::vector<float> samples;
  int sample_rate_hz = 0;

  double duration_s() const {
    return sample_rate_hz > 0
               ? static_cast<double>(samples.size()) / sample_rate_hz
               : 0.0;
  }
};

// Parses a RIFF/WAVE byte stream.  PCM16 and IEEE float32 are accepted;
// multichannel input is averaged down to mono.  Malformed containers raise
// kDecode, other sample encodings raise kUnsupported.
AudioBuffer decode_wav(const std::vector<uint8_t>& bytes);

// Reads a WAV file from disk via decode_wav.
AudioBuffer read_wav(const std::string& path);

// Serializes mono audio as 16-bit PCM WAV.  Samples are clamped to [-1, 1].
std::vector<uint8_t> encode_wav_pcm16(const AudioBuffer& audio);
void write_wav(const std::string& path, const AudioBuffer& audio);

// Windowed-sinc sample-rate conversion (Kaiser window, 32 taps per side).
// Same-rate input is returned unchanged, bit for bit.
AudioBuffer resample(const AudioBuffer& audio, int target_rate_hz);

// Speed perturbation by resampling the waveform while keeping the declared
// sample rate.  factor > 1 shortens the signal, factor < 1 stretches it.
AudioBuffer speed_perturb(const AudioBuffer& audio, double factor);

// Cuts [offset_s, offset_s + duration_s) out of the buffer.  The window is
// clamped to the available samples.
AudioBuffer slice(const AudioBuffer& audio, double offset_s,
                  double duration_s);

namespace detail {
// Shared resampling core: output length is round(n * ratio) and each output
// sample interpolates the input at position i / ratio.
std::vector<float> resample_ratio(const std::vector<float>& in, double ratio);
}  // namespace detail

}  // namespace cslid

#endif  // CSLID_DSP_AUDIO_HPP_
