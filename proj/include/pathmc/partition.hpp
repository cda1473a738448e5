#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace pathmc {

// Ordered mesh 0 = s_0 < s_1 < ... < s_n = 1 of the unit interval.
class Partition {
public:
    explicit Partition(std::vector<double> times) : times_(std::move(times)) {
        if (times_.size() < 2)
            throw std::invalid_argument("partition needs at least two points");
        if (times_.front() != 0.0 || times_.back() != 1.0)
            throw std::invalid_argument("partition endpoints must be exactly 0 and 1");
        for (std::size_t i = 1; i < times_.size(); ++i)
            if (!(times_[i] > times_[i - 1]))
                throw std::invalid_argument("partition times must be strictly increasing");
    }

    static Partition uniform(int n) {
        if (n < 1) throw std::invalid_argument("uniform partition needs n >= 1");
        std::vector<double> t(static_cast<std::size_t>(n) + 1);
        for (int i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = double(i) / double(n);
        t.front() = 0.0;
        t.back() = 1.0;
        return Partition(std::move(t));
    }

    int segments() const { return static_cast<int>(times_.size()) - 1; }
    double time(int i) const { return times_[static_cast<std::size_t>(i)]; }
    double dt(int i) const { return times_[static_cast<std::size_t>(i) + 1] - times_[static_cast<std::size_t>(i)]; }
    const std::vector<double>& times() const { return times_; }

    double mesh() const {
        double m = 0.0;
        for (int i = 0; i < segments(); ++i) m = std::max(m, dt(i));
        return m;
    }

    bool operator==(const Partition& other) const { return times_ == other.times_; }

private:
    std::vector<double> times_;
};

} // namespace pathmc
