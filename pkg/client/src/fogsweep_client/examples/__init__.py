"""Runnable example agents: a scripted random evader and a learner loop
skeleton. Each module has a main(argv) and can be run with python -m."""
