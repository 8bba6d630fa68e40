int dummy_test_behaviors;
