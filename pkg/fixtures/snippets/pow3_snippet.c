for(int i = 1; i <= N; i+=3)
   if(i > 0 && 1162261467 % i)
      //If-body
      ;
