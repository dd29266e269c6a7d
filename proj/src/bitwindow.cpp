#include "dynlab/bitwindow.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <sstream>

#include "dynlab/error.hpp"

namespace dynlab {

namespace {

uint64_t word_count(uint64_t horizon) { return (horizon + 63) / 64; }

} // namespace

BitWindow::BitWindow(uint64_t horizon, bool fill)
    : horizon_(horizon), words_(word_count(horizon), fill ? ~uint64_t{0} : 0) {
  if (fill && horizon_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (uint64_t{1} << (horizon_ % 64)) - 1;
  }
}

bool BitWindow::test(uint64_t n) const {
  if (n >= horizon_) {
    return false;
  }
  return (words_[n / 64] >> (n % 64)) & 1;
}

void BitWindow::set(uint64_t n, bool value) {
  if (n >= horizon_) {
    throw_invalid("BitWindow::set index beyond horizon");
  }
  const uint64_t mask = uint64_t{1} << (n % 64);
  if (value) {
    words_[n / 64] |= mask;
  } else {
    words_[n / 64] &= ~mask;
  }
}

uint64_t BitWindow::count() const {
  uint64_t total = 0;
  for (uint64_t w : words_) {
    total += static_cast<uint64_t>(std::popcount(w));
  }
  return total;
}

std::optional<uint64_t> BitWindow::first() const {
  for (size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) {
      return i * 64 + static_cast<uint64_t>(std::countr_zero(words_[i]));
    }
  }
  return std::nullopt;
}

std::vector<uint64_t> BitWindow::elements() const {
  std::vector<uint64_t> out;
  out.reserve(count());
  for (size_t i = 0; i < words_.size(); ++i) {
    uint64_t w = words_[i];
    while (w != 0) {
      const int bit = std::countr_zero(w);
      out.push_back(i * 64 + static_cast<uint64_t>(bit));
      w &= w - 1;
    }
  }
  return out;
}

BitWindow BitWindow::intersect(const BitWindow& other) const {
  if (horizon_ != other.horizon_) {
    throw_invalid("BitWindow horizon mismatch in intersection");
  }
  BitWindow out(horizon_);
  for (size_t i = 0; i < words_.size(); ++i) {
    out.words_[i] = words_[i] & other.words_[i];
  }
  return out;
}

BitWindow BitWindow::unite(const BitWindow& other) const {
  if (horizon_ != other.horizon_) {
    throw_invalid("BitWindow horizon mismatch in union");
  }
  BitWindow out(horizon_);
  for (size_t i = 0; i < words_.size(); ++i) {
    out.words_[i] = words_[i] | other.words_[i];
  }
  return out;
}

BitWindow BitWindow::complement() const {
  BitWindow out(horizon_);
  for (size_t i = 0; i < words_.size(); ++i) {
    out.words_[i] = ~words_[i];
  }
  if (horizon_ % 64 != 0 && !out.words_.empty()) {
    out.words_.back() &= (uint64_t{1} << (horizon_ % 64)) - 1;
  }
  return out;
}

BitWindow BitWindow::translated(uint64_t k) const {
  BitWindow out(horizon_);
  for (uint64_t n = 0; n + k < horizon_; ++n) {
    if (test(n)) {
      out.set(n + k);
    }
  }
  return out;
}

BitWindow BitWindow::strided(uint64_t stride) const {
  if (stride == 0) {
    throw_invalid("BitWindow::strided requires stride >= 1");
  }
  BitWindow out((horizon_ + stride - 1) / stride);
  for (uint64_t i = 0; i * stride < horizon_; ++i) {
    if (test(i * stride)) {
      out.set(i);
    }
  }
  return out;
}

BitWindow BitWindow::resized(uint64_t new_horizon) const {
  BitWindow out(new_horizon);
  const uint64_t upto = std::min(new_horizon, horizon_);
  for (uint64_t n = 0; n < upto; ++n) {
    if (test(n)) {
      out.set(n);
    }
  }
  return out;
}

bool BitWindow::intersects(const BitWindow& other) const {
  const size_t upto = std::min(words_.size(), other.words_.size());
  for (size_t i = 0; i < upto; ++i) {
    if ((words_[i] & other.words_[i]) != 0) {
      return true;
    }
  }
  return false;
}

bool BitWindow::is_subset_of(const BitWindow& other) const {
  if (horizon_ != other.horizon_) {
    throw_invalid("BitWindow horizon mismatch in subset test");
  }
  for (size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) {
      return false;
    }
  }
  return true;
}

bool BitWindow::operator==(const BitWindow& other) const {
  return horizon_ == other.horizon_ && words_ == other.words_;
}

BitWindow::Run BitWindow::longest_run() const {
  Run best;
  uint64_t start = 0;
  uint64_t len = 0;
  for (uint64_t n = 0; n < horizon_; ++n) {
    if (test(n)) {
      if (len == 0) {
        start = n;
      }
      ++len;
      if (len > best.length) {
        best = {start, len};
      }
    } else {
      len = 0;
    }
  }
  return best;
}

std::optional<uint64_t> BitWindow::find_empty_interval(uint64_t g) const {
  if (g == 0 || g > horizon_) {
    return std::nullopt;
  }
  uint64_t len = 0;
  for (uint64_t n = 0; n < horizon_; ++n) {
    len = test(n) ? 0 : len + 1;
    if (len >= g) {
      return n + 1 - g;
    }
  }
  return std::nullopt;
}

BitWindow::Run BitWindow::longest_gap() const {
  return complement().longest_run();
}

std::string BitWindow::to_text() const {
  std::ostringstream out;
  out << "H=" << horizon_ << "\n";
  for (uint64_t n : elements()) {
    out << n << "\n";
  }
  return out.str();
}

BitWindow BitWindow::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("H=", 0) != 0) {
    throw_parse("window file must start with an H=<int> header");
  }
  uint64_t horizon = 0;
  {
    const char* b = line.data() + 2;
    const char* e = line.data() + line.size();
    auto [p, ec] = std::from_chars(b, e, horizon);
    if (ec != std::errc{} || p != e) {
      throw_parse("malformed horizon in window header: " + line);
    }
  }
  BitWindow out(horizon);
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    const auto colon = line.find(':');
    uint64_t start = 0;
    uint64_t length = 1;
    const char* e = line.data() + line.size();
    if (colon == std::string::npos) {
      auto [p, ec] = std::from_chars(line.data(), e, start);
      if (ec != std::errc{} || p != e) {
        throw_parse("malformed window element: " + line);
      }
    } else {
      auto [p1, ec1] = std::from_chars(line.data(), line.data() + colon, start);
      auto [p2, ec2] = std::from_chars(line.data() + colon + 1, e, length);
      if (ec1 != std::errc{} || ec2 != std::errc{} ||
          p1 != line.data() + colon || p2 != e) {
        throw_parse("malformed run-length line: " + line);
      }
    }
    for (uint64_t n = start; n < start + length; ++n) {
      if (n >= horizon) {
        throw_parse("window element beyond declared horizon: " +
                    std::to_string(n));
      }
      out.set(n);
    }
  }
  return out;
}

} // namespace dynlab
