#include <threeprimes/fft.hpp>

#include <fftw3.h>

#include <bit>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace threeprimes {

namespace {

std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n)
{
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr)
    throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

class Plan {
public:
  explicit Plan(fftw_plan p) : plan_(p)
  {
    if (plan_ == nullptr)
      throw std::runtime_error("fftw: plan creation failed");
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan()
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

private:
  fftw_plan plan_;
};

} // namespace

std::vector<double> convolve(std::span<const double> a, std::span<const double> b)
{
  if (a.empty() || b.empty())
    return {};
  const std::size_t out_len = a.size() + b.size() - 1;
  const std::size_t n = std::bit_ceil(out_len);
  const std::size_t nc = n / 2 + 1;

  auto ra = fftw_buffer<double>(n);
  auto rb = fftw_buffer<double>(n);
  auto ca = fftw_buffer<fftw_complex>(nc);
  auto cb = fftw_buffer<fftw_complex>(nc);

  std::unique_ptr<Plan> fa, fb, inv;
  {
    std::lock_guard lock(planner_mutex());
    const int ni = static_cast<int>(n);
    fa = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(ni, ra.get(), ca.get(), FFTW_ESTIMATE));
    fb = std::make_unique<Plan>(fftw_plan_dft_r2c_1d(ni, rb.get(), cb.get(), FFTW_ESTIMATE));
    inv = std::make_unique<Plan>(fftw_plan_dft_c2r_1d(ni, ca.get(), ra.get(), FFTW_ESTIMATE));
  }

  std::fill(ra.get(), ra.get() + n, 0.0);
  std::fill(rb.get(), rb.get() + n, 0.0);
  std::copy(a.begin(), a.end(), ra.get());
  std::copy(b.begin(), b.end(), rb.get());
  fa->execute();
  fb->execute();
  for (std::size_t k = 0; k < nc; ++k) {
    const double re = ca[k][0] * cb[k][0] - ca[k][1] * cb[k][1];
    const double im = ca[k][0] * cb[k][1] + ca[k][1] * cb[k][0];
    ca[k][0] = re;
    ca[k][1] = im;
  }
  inv->execute();

  std::vector<double> out(out_len);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < out_len; ++k)
    out[k] = ra[k] * scale;
  return out;
}

std::vector<std::complex<double>> fourier_grid(std::span<const double> values,
                                               std::int64_t first, std::size_t M)
{
  if (M == 0)
    throw std::invalid_argument("fourier_grid: M must be positive");
  const auto m = static_cast<std::int64_t>(M);

  auto in = fftw_buffer<fftw_complex>(M);
  auto out = fftw_buffer<fftw_complex>(M);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_1d(static_cast<int>(M), in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < M; ++k)
    in[k][0] = in[k][1] = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    std::int64_t r = (first + static_cast<std::int64_t>(j)) % m;
    if (r < 0)
      r += m;
    in[r][0] += values[j];
  }
  plan->execute();

  std::vector<std::complex<double>> result(M);
  for (std::size_t k = 0; k < M; ++k)
    result[k] = {out[k][0], out[k][1]};
  return result;
}

} // namespace threeprimes
