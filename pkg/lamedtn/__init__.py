name = "lamedtn"
