// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/worker_pool.hpp"

#include "tdinv/types.hpp"

namespace tdinv
{

WorkerPool::WorkerPool(int workers) : workers_(workers)
{
  Require(workers >= 1, "worker count must be at least 1");
  for (int w = 1; w < workers_; w++)
  {
    threads_.emplace_back([this, w] { Loop(w); });
  }
}

WorkerPool::~WorkerPool()
{
  {
    std::lock_guard<std::mutex> lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto &t : threads_)
  {
    t.join();
  }
}

void WorkerPool::RunOwned(int worker)
{
  for (int k = worker; k < count_; k += workers_)
  {
    try
    {
      (*body_)(k);
    }
    catch (...)
    {
      std::lock_guard<std::mutex> lock(mutex_);
      if (!error_)
      {
        error_ = std::current_exception();
      }
    }
  }
}

void WorkerPool::Loop(int worker)
{
  long seen = 0;
  for (;;)
  {
    {
      std::unique_lock<std::mutex> lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_)
      {
        return;
      }
      seen = generation_;
    }
    RunOwned(worker);
    {
      std::lock_guard<std::mutex> lock(mutex_);
      pending_--;
    }
    done_cv_.notify_one();
  }
}

void WorkerPool::Run(int count, const std::function<void(int)> &body)
{
  if (count <= 0)
  {
    return;
  }
  {
    std::lock_guard<std::mutex> lock(mutex_);
    body_ = &body;
    count_ = count;
    error_ = nullptr;
    pending_ = workers_ - 1;
    generation_++;
  }
  start_cv_.notify_all();
  RunOwned(0);
  std::exception_ptr error;
  {
    std::unique_lock<std::mutex> lock(mutex_);
    done_cv_.wait(lock, [&] { return pending_ == 0; });
    body_ = nullptr;
    error = error_;
  }
  if (error)
  {
    std::rethrow_exception(error);
  }
}

}  // namespace tdinv
