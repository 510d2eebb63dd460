#pragma once

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace pipg {

/// Persistent worker pool running index-range tasks. parallel_for splits
/// [begin, end) into one contiguous chunk per worker; each index must write
/// only its own outputs, so results are independent of the thread count.
class ThreadPool {
public:
  explicit ThreadPool(int threads) : threads_(threads < 1 ? 1 : threads) {
    for (int t = 1; t < threads_; ++t)
      workers_.emplace_back([this, t] { worker_loop(t); });
  }

  ~ThreadPool() {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      stop_ = true;
      ++generation_;
    }
    start_cv_.notify_all();
    for (auto& th : workers_) th.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  int thread_count() const { return threads_; }

  void parallel_for(Eigen::Index begin, Eigen::Index end,
                    const std::function<void(Eigen::Index)>& fn) {
    if (end <= begin) return;
    if (threads_ == 1 || end - begin == 1) {
      for (Eigen::Index i = begin; i < end; ++i) fn(i);
      return;
    }
    {
      std::unique_lock<std::mutex> lock(mutex_);
      fn_ = &fn;
      begin_ = begin;
      end_ = end;
      pending_ = threads_ - 1;
      error_ = nullptr;
      ++generation_;
    }
    start_cv_.notify_all();
    run_chunk(0);  // the calling thread takes chunk 0
    {
      std::unique_lock<std::mutex> lock(mutex_);
      done_cv_.wait(lock, [this] { return pending_ == 0; });
      fn_ = nullptr;
      if (error_) std::rethrow_exception(error_);
    }
  }

private:
  void run_chunk(int who) {
    const Eigen::Index total = end_ - begin_;
    const Eigen::Index chunk = (total + threads_ - 1) / threads_;
    const Eigen::Index lo = begin_ + who * chunk;
    const Eigen::Index hi = std::min(end_, lo + chunk);
    try {
      for (Eigen::Index i = lo; i < hi; ++i) (*fn_)(i);
    } catch (...) {
      std::unique_lock<std::mutex> lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
  }

  void worker_loop(int who) {
    std::uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lock(mutex_);
        start_cv_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stop_) return;
      }
      run_chunk(who);
      {
        std::unique_lock<std::mutex> lock(mutex_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  int threads_;
  std::vector<std::thread> workers_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(Eigen::Index)>* fn_ = nullptr;
  Eigen::Index begin_ = 0;
  Eigen::Index end_ = 0;
  int pending_ = 0;
  std::uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace pipg
