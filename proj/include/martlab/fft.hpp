#ifndef MARTLAB_FFT_HPP
#define MARTLAB_FFT_HPP

#include <complex>
#include <vector>

namespace martlab {

// In-place iterative radix-2 FFT; size must be a power of two (all embedding
// sizes here are). inverse applies the conjugate transform including the 1/n
// scale, so fft(fft(x), inverse) == x up to rounding.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

}  // namespace martlab

#endif
