// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_WORKER_POOL_HPP
#define TDINV_WORKER_POOL_HPP

#include <condition_variable>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tdinv
{

//
// Persistent pool of W workers with a static task partition: task k belongs to worker
// k mod W, so the same worker always handles the same pole and two workers never share a
// task. The calling thread acts as worker 0.
//
class WorkerPool
{
public:
  explicit WorkerPool(int workers = 1);
  ~WorkerPool();

  WorkerPool(const WorkerPool &) = delete;
  WorkerPool &operator=(const WorkerPool &) = delete;

  int size() const { return workers_; }

  static int Owner(int task, int workers) { return task % workers; }

  // Runs body(k) for k in [0, count) and blocks until all are done. The first exception
  // thrown by any task is rethrown here after the batch finishes.
  void Run(int count, const std::function<void(int)> &body);

private:
  void Loop(int worker);
  void RunOwned(int worker);

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_, done_cv_;
  const std::function<void(int)> *body_ = nullptr;
  int count_ = 0;
  long generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace tdinv

#endif  // TDINV_WORKER_POOL_HPP
