#ifndef CLIPFORGE_THREAD_POOL_HPP
#define CLIPFORGE_THREAD_POOL_HPP

#include <condition_variable>
#include <cstdlib>
#include <functional>
#include <future>
#include <mutex>
#include <queue>
#include <thread>
#include <vector>

namespace clipforge {

// Bounded worker pool. Tasks are independent; callers that need ordered
// results key them by index (see parallel_map), so schedules never leak
// into output files.
class ThreadPool {
 public:
  explicit ThreadPool(size_t workers) {
    if (workers == 0) workers = 1;
    for (size_t i = 0; i < workers; ++i)
      threads_.emplace_back([this] { worker_loop(); });
  }

  ~ThreadPool() {
    {
      std::lock_guard<std::mutex> lk(mu_);
      done_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  ThreadPool(const ThreadPool&) = delete;
  ThreadPool& operator=(const ThreadPool&) = delete;

  size_t worker_count() const { return threads_.size(); }

  template <typename F>
  std::future<void> submit(F&& fn) {
    auto task = std::make_shared<std::packaged_task<void()>>(std::forward<F>(fn));
    auto fut = task->get_future();
    {
      std::lock_guard<std::mutex> lk(mu_);
      queue_.push([task] { (*task)(); });
    }
    cv_.notify_one();
    return fut;
  }

 private:
  void worker_loop() {
    for (;;) {
      std::function<void()> job;
      {
        std::unique_lock<std::mutex> lk(mu_);
        cv_.wait(lk, [this] { return done_ || !queue_.empty(); });
        if (queue_.empty()) return;
        job = std::move(queue_.front());
        queue_.pop();
      }
      job();
    }
  }

  std::mutex mu_;
  std::condition_variable cv_;
  std::queue<std::function<void()>> queue_;
  std::vector<std::thread> threads_;
  bool done_ = false;
};

// Runs fn(i) for i in [0, n) and collects results in index order. Exceptions
// from tasks propagate to the caller after all tasks finish.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(ThreadPool* pool, size_t n, Fn&& fn) {
  std::vector<Result> results(n);
  if (!pool || pool->worker_count() <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) results[i] = fn(i);
    return results;
  }
  std::vector<std::future<void>> futures;
  futures.reserve(n);
  std::mutex err_mu;
  std::exception_ptr first_error;
  for (size_t i = 0; i < n; ++i) {
    futures.push_back(pool->submit([&, i] {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }));
  }
  for (auto& f : futures) f.wait();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

// CLIPFORGE_WORKERS override, hardware_concurrency otherwise.
inline size_t default_worker_count() {
  if (const char* env = std::getenv("CLIPFORGE_WORKERS"); env && *env) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1) return static_cast<size_t>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

}  // namespace clipforge

#endif  // CLIPFORGE_THREAD_POOL_HPP
